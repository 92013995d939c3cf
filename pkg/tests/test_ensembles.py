import json
import math

import numpy as np
import pytest

from aqec_lab.choi import encode_epr_state
from aqec_lab.ensembles import (
    CircuitSpec,
    EnsembleParams,
    Gate,
    brickwork_depth,
    build,
    build_block_encoding,
    build_brickwork,
    build_double_layer,
    constructed_depth,
    distribute_slots,
    double_layer_regions,
    matched_xi,
    pauli_twirl_wrap,
    xi_of,
)
from aqec_lab.errors import ContractViolation, ParameterError
from aqec_lab.stabilizer import ErasureAnalyzer


def test_xi_rounding():
    assert xi_of(256, 1.0) == 8
    assert xi_of(256, 0.5) == 9
    assert xi_of(1000, 1.0) == 10


def test_double_layer_n256():
    spec = build(EnsembleParams(256, 32, 1.0))
    assert spec.meta["xi"] == 8
    assert [len(l) for l in spec.layers] == [16, 15]
    assert constructed_depth(spec) == 16
    assert spec.k == 32
    assert all(len(g.support) == 16 for layer in spec.layers for g in layer)


def test_double_layer_remainder_region():
    regions = double_layer_regions(64, 12)
    assert len(regions) == 4
    assert [len(r) for r in regions] == [12, 12, 12, 28]
    assert sorted(q for r in regions for q in r) == list(range(64))
    with pytest.raises(ParameterError):
        double_layer_regions(10, 10)


def test_distribute_slots_totals():
    assert distribute_slots([4, 4, 4, 4], 4) == [1, 1, 1, 1]
    for k in range(0, 25):
        counts = distribute_slots([7, 5, 9, 3], k)
        assert sum(counts) == k and all(c <= s for c, s in zip(counts, [7, 5, 9, 3]))


def test_matched_xi():
    assert matched_xi(240, 240 ** -0.375) == 12
    with pytest.raises(ParameterError):
        matched_xi(7, 1.0)


def test_block_encoding_layout():
    spec = build_block_encoding(EnsembleParams(240, 48, 0.1, "block", xi=12))
    assert len(spec.layers) == 1 and len(spec.layers[0]) == 5
    assert spec.k == 48
    with pytest.raises(ParameterError):
        build_block_encoding(EnsembleParams(50, 4, 0.1, "block", xi=3))


def test_brickwork_layout():
    spec = build_brickwork(EnsembleParams(64, 8, 0.1, "brickwork"))
    assert spec.depth == brickwork_depth(64, 8, 0.1)
    assert spec.boundary == "periodic"
    first, second = spec.layers[0], spec.layers[1]
    assert first[0].support == tuple(range(16))
    assert second[-1].support == tuple(range(56, 64)) + tuple(range(8))
    with pytest.raises(ParameterError):
        build_brickwork(EnsembleParams(12, 3, 0.1, "brickwork"))


def test_brickwork_depth_grows_with_log_n_over_eps():
    d1 = brickwork_depth(64, 8, 0.1)
    d2 = brickwork_depth(64, 8, 0.01)
    assert d2 - d1 in (3, 4)  # log2(10) added


def test_spec_roundtrip_json():
    spec = build(EnsembleParams(32, 4, 1.0, xi=4), seed=5)
    again = CircuitSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert again == spec
    assert again.to_dict() == spec.to_dict()


def test_spec_rejects_overlap():
    with pytest.raises(ContractViolation):
        CircuitSpec(4, ((Gate((0, 1)), Gate((1, 2))),), (0,)).validate()
    with pytest.raises(ContractViolation):
        CircuitSpec(4, ((Gate((0, 4)),),), (0,)).validate()


def test_params_validation():
    with pytest.raises(ParameterError):
        EnsembleParams(10, 11, 0.1)
    with pytest.raises(ParameterError):
        EnsembleParams(10, 2, 0.0)
    with pytest.raises(ParameterError):
        EnsembleParams(10, 2, 0.1, "nope")


def test_pauli_twirl_keeps_damage_and_merges():
    spec = build(EnsembleParams(16, 4, 1.0, xi=2))
    rng = np.random.default_rng(0)
    twirled = pauli_twirl_wrap(spec, rng)
    twice = pauli_twirl_wrap(twirled, rng)
    assert twice.depth == twirled.depth == spec.depth + 1
    a = ErasureAnalyzer(encode_epr_state(spec, np.random.default_rng(9)), range(4))
    b = ErasureAnalyzer(encode_epr_state(twirled, np.random.default_rng(9)), range(4))
    for _ in range(30):
        t = [q for q in range(16) if rng.random() < 0.3]
        assert a.damage_local(t) == b.damage_local(t)
