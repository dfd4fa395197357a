import itertools
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from exactrepair.codes import (
    CodeValidationError,
    ResourceCapError,
    build_concrete,
    build_small_msr,
    dumps,
    extend_with_empty_nodes,
    glue_all_permutations,
    reconstruct,
    repair,
)
from exactrepair.tradeoff import ParameterError, SystemParams

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def small423():
    return build_small_msr(4, 2)


@pytest.fixture(scope="module")
def glued533():
    return build_concrete(SystemParams(5, 3, 3), 2, seed=7)


class TestSmallMsr:
    def test_layout_423(self, small423):
        assert small423.alpha_hat == 2
        assert small423.file_symbols == 4
        assert small423.supported_degrees == (2, 3)

    def test_bandwidth_by_degree(self, small423):
        for (_, helpers), s in small423.schemes.items():
            assert s.bandwidth == {3: 3, 2: 4}[len(helpers)]

    def test_every_pair_reconstructs(self, small423):
        fld = small423.field
        for pair in itertools.combinations(range(4), 2):
            assert fld.rank(small423.stacked(pair)) == 4

    @pytest.mark.parametrize("k_hat", [1, 2, 3])
    def test_schemes_repair_exactly(self, k_hat):
        small = build_small_msr(k_hat + 2, k_hat)
        fld = small.field
        rng = np.random.default_rng(k_hat)
        file = rng.integers(0, fld.q, size=small.file_symbols)
        nodes = small.encode(file)
        for (f, helpers), s in small.schemes.items():
            received = np.concatenate([fld.matmul(s.transmit[h], nodes[h].reshape(-1, 1)).ravel() for h in helpers])
            assert np.array_equal(np.mod(s.combine @ received, fld.q), nodes[f])

    def test_rejects_other_parity_counts(self):
        with pytest.raises(CodeValidationError, match="n_hat - k_hat = 2"):
            build_small_msr(5, 2)

    def test_rejects_unsupported_k_hat(self):
        with pytest.raises(CodeValidationError, match="unsatisfiable"):
            build_small_msr(6, 4)

    def test_field_too_small(self):
        with pytest.raises(CodeValidationError, match="field too small"):
            build_small_msr(4, 2, field=5)

    def test_small_field_where_possible(self):
        small = build_small_msr(3, 1, field=7)
        assert small.field.q == 7

    def test_scheme_for_picks_largest_degree(self, small423):
        assert small423.scheme_for(0, [1, 2, 3]).degree == 3
        assert small423.scheme_for(0, [2, 3]).degree == 2
        with pytest.raises(CodeValidationError):
            small423.scheme_for(0, [3])


class TestHeterogeneous:
    def test_fig2a_layout(self, small423):
        het = extend_with_empty_nodes(small423, 5)
        assert het.storage() == [2, 2, 2, 2, 0]
        assert het.role(4) is None and het.role(2) == 2

    def test_identity_extension(self, small423):
        het = extend_with_empty_nodes(small423, 4)
        assert het.storage() == [2] * 4

    def test_pigeonhole(self, small423):
        het = extend_with_empty_nodes(small423, 5)
        for subset in itertools.combinations(range(5), 3):
            assert len(set(subset) & set(het.placement)) >= 2

    @pytest.mark.parametrize("placement", [(0, 1, 2), (0, 1, 2, 2), (0, 1, 2, 9)])
    def test_bad_placement(self, small423, placement):
        with pytest.raises(ValueError):
            extend_with_empty_nodes(small423, 5, placement)


class TestGlued:
    def test_copy_count_and_storage(self, glued533):
        assert glued533.copies == 120
        # 96 copies place a given node inside the small code, 2 subsymbols each
        assert glued533.storage_per_node() == [192] * 5
        assert glued533.alpha == Fraction(2, 5)

    def test_no_empty_nodes(self, small423):
        g = glue_all_permutations(extend_with_empty_nodes(small423, 4))
        assert g.copies == 24
        assert g.present.all()

    def test_cap(self):
        small = build_small_msr(3, 1)
        with pytest.raises(ResourceCapError, match="--cap-override"):
            glue_all_permutations(extend_with_empty_nodes(small, 8))

    def test_concrete_regime_only(self):
        with pytest.raises(ParameterError):
            build_concrete(SystemParams(6, 3, 3), 2)

    def test_seed_determines_files(self):
        a = build_concrete(SystemParams(4, 2, 2), 1, seed=3)
        b = build_concrete(SystemParams(4, 2, 2), 1, seed=3)
        c = build_concrete(SystemParams(4, 2, 2), 1, seed=4)
        assert np.array_equal(a.files, b.files)
        assert not np.array_equal(a.files, c.files)


class TestReconstructRepair:
    def test_all_subsets_reconstruct(self, glued533):
        for subset in itertools.combinations(range(5), 3):
            assert np.array_equal(reconstruct(glued533, subset), glued533.files)

    def test_whole_small_code_subset(self, glued533):
        c = 0
        positions = glued533.placements[c]
        out = reconstruct(glued533, positions)
        assert np.array_equal(out[c], glued533.files[c])

    def test_corruption_is_detected(self):
        g = build_concrete(SystemParams(5, 3, 3), 2, seed=1)
        pos = g.placements[0][0]
        g.contents[0, pos, 1] = (g.contents[0, pos, 1] + 3) % g.field.q
        outs = [reconstruct(g, s) for s in itertools.combinations(range(5), 3)]
        assert any(not np.array_equal(o, g.files) for o in outs)
        others = [i for i in range(5) if i != pos]
        assert not repair(g, pos, others[:3]).exact

    def test_case1_case2_and_empty(self, glued533):
        out = repair(glued533, 0, (1, 2, 3))
        assert out.exact
        for c in range(glued533.copies):
            placement = glued533.placements[c]
            if 0 not in placement:
                assert out.per_copy[c] == 0
            elif all(h in placement for h in (1, 2, 3)):
                assert out.per_copy[c] == 3
            else:
                assert out.per_copy[c] == 4
        assert set(out.per_copy.tolist()) == {0, 3, 4}

    def test_invalid_requests(self, glued533):
        with pytest.raises(ValueError):
            repair(glued533, 0, (0, 1, 2))
        with pytest.raises(ValueError):
            repair(glued533, 0, (1, 1, 2))


class TestSerialization:
    def test_deterministic(self):
        a = dumps(build_concrete(SystemParams(4, 2, 2), 2, seed=0))
        b = dumps(build_concrete(SystemParams(4, 2, 2), 2, seed=0))
        assert a == b

    def test_golden(self):
        text = dumps(build_concrete(SystemParams(4, 2, 2), 2, seed=0))
        assert text == (GOLDEN / "glued_n4_k2_d2_khat2_seed0.txt").read_text()

    def test_structure(self, glued533):
        lines = dumps(glued533).splitlines()
        assert lines[0] == "glued-code v1"
        assert "field 11" in lines
        assert "copies 120" in lines
        copy_lines = [l for l in lines if l.startswith("copy ")]
        assert len(copy_lines) == 120
        for line in copy_lines:
            roles = line.split(" nodes ")[1].split(" file ")[0].split()
            assert len(roles) == 5 and roles.count("-") == 1
