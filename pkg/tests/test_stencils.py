import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvsr.errors import BankParseError, BankValidationError
from tvsr.stencils import (
    N_TEMPLATES,
    StencilTemplate,
    build_default_bank,
    default_bank,
    signature,
    signature_distance,
    stencil_response,
)

BANK = default_bank()


def dyadic_patch(seed, denom=256):
    rng = np.random.default_rng(seed)
    return rng.integers(0, denom // 2, (5, 5)) / float(denom)


# ---------------------------------------------------------------- structure


def test_default_bank_structure():
    assert len(BANK.templates) == N_TEMPLATES
    slots = [(t.class_d, t.index_k) for t in BANK.templates]
    assert slots == [(d, k) for d in (1, 2, 3) for k in range(1, 9)]
    assert BANK.version == "v1"
    for t in BANK.templates:
        assert all(w >= 0 for *_, w in t.pairs)
        assert any(w > 0 for *_, w in t.pairs)


def _bank_text(mutate=None):
    lines = ["stencil-bank v1 footprint 5 5"]
    for d in (1, 2, 3):
        for k in range(1, 9):
            lines.append(f"template {d} {k} 1")
            lines.append("0 0 0 1 1.0")
    text = "\n".join(lines)
    return mutate(text) if mutate else text


def test_parse_minimal_bank():
    bank = build_default_bank(_bank_text())
    assert len(bank.templates) == 24


def test_parse_duplicate_slot():
    text = _bank_text().replace("template 1 3 1", "template 1 2 1", 1)
    with pytest.raises(BankValidationError, match="duplicate|missing"):
        build_default_bank(text)


def test_parse_negative_weight():
    text = _bank_text().replace("0 0 0 1 1.0", "0 0 0 1 -1", 1)
    with pytest.raises(BankValidationError, match="negative weight"):
        build_default_bank(text)


def test_parse_offset_outside_footprint():
    text = _bank_text().replace("0 0 0 1 1.0", "0 0 0 3 1.0", 1)
    with pytest.raises(BankValidationError, match="outside footprint"):
        build_default_bank(text)


def test_parse_bad_header_has_line_number():
    with pytest.raises(BankParseError, match="line 1"):
        build_default_bank("not-a-bank v1 footprint 5 5")


def test_parse_wrong_footprint():
    text = _bank_text().replace("footprint 5 5", "footprint 7 7")
    with pytest.raises(BankValidationError, match="footprint"):
        build_default_bank(text)


def test_parse_truncated_template():
    text = "\n".join(_bank_text().splitlines()[:-1])
    with pytest.raises(BankParseError, match="end of file"):
        build_default_bank(text)


def test_parse_missing_templates():
    text = "\n".join(_bank_text().splitlines()[:-10])
    with pytest.raises(BankValidationError, match="missing"):
        build_default_bank(text)


# ---------------------------------------------------------------- responses


def test_constant_patch_zero_response():
    patch = np.full((5, 5), 0.41)
    for t in BANK.templates:
        assert stencil_response(patch, t) == 0.0


def test_hand_built_strip_template():
    # 12 horizontal-adjacent pairs in a 3-row strip, weight 1; a 0/1 column
    # step crosses exactly one pair per row -> response 3.0
    pairs = tuple(
        (r, c, r, c + 1, 1.0) for r in (-1, 0, 1) for c in (-2, -1, 0, 1)
    )
    template = StencilTemplate(1, 1, pairs)
    patch = np.zeros((5, 5))
    patch[:, 3:] = 1.0  # columns (0,0,0,1,1)
    assert stencil_response(patch, template) == 3.0


def test_footprint_mismatch():
    with pytest.raises(ValueError, match="footprint"):
        stencil_response(np.zeros((7, 7)), BANK.templates[0])
    with pytest.raises(ValueError, match="footprint"):
        signature(np.zeros((3, 3)), BANK)


def test_shift_invariance_exact():
    patch = dyadic_patch(0)
    shifted = patch + 32 / 256.0
    for t in BANK.templates:
        assert stencil_response(shifted, t) == stencil_response(patch, t)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.01, max_value=1.0), st.integers(0, 1000))
def test_positive_homogeneity(scale, seed):
    patch = dyadic_patch(seed)
    for t in BANK.templates[::5]:
        assert stencil_response(patch * scale, t) == pytest.approx(
            scale * stencil_response(patch, t), abs=1e-12
        )


def test_signature_constant_tie_break():
    sig = signature(np.full((5, 5), 0.8), BANK)
    assert sig.best == (1, 1)
    assert all(r == 0.0 for r in sig.responses)


def test_vertical_step_prefers_vertical_class():
    patch = np.zeros((5, 5))
    patch[:, 2:] = 1.0
    sig = signature(patch, BANK)
    # brute-force oracle over all 24 responses
    responses = [stencil_response(patch, t) for t in BANK.templates]
    best_idx = min(range(24), key=lambda i: (responses[i], i))
    assert sig.best == (best_idx // 8 + 1, best_idx % 8 + 1)
    assert sig.best[0] == 2
    assert sig.responses[best_idx] == 0.0


def test_horizontal_and_diagonal_steps():
    vert = np.zeros((5, 5))
    vert[2:, :] = 1.0
    assert signature(vert, BANK).best[0] == 1
    rr, cc = np.meshgrid(range(-2, 3), range(-2, 3), indexing="ij")
    assert signature((cc > rr).astype(float), BANK).best[0] == 3
    assert signature((rr + cc > 0).astype(float), BANK).best[0] == 3


def test_best_invariant_under_positive_affine():
    patch = dyadic_patch(5)
    base = signature(patch, BANK)
    mapped = signature(0.4 * patch + 0.2, BANK)
    assert mapped.best == base.best


def test_brute_force_argmin_on_random_patches():
    rng = np.random.default_rng(11)
    for _ in range(100):
        patch = rng.random((5, 5))
        sig = signature(patch, BANK)
        responses = [stencil_response(patch, t) for t in BANK.templates]
        best_idx = min(range(24), key=lambda i: (responses[i], i))
        assert sig.best == (best_idx // 8 + 1, best_idx % 8 + 1)
        assert list(sig.responses) == responses


# ---------------------------------------------------------------- distances


def test_distance_identity_and_single_slot():
    patch = dyadic_patch(3)
    sig = signature(patch, BANK)
    assert signature_distance(sig, sig) == 0.0
    bumped = list(sig.responses)
    bumped[7] += 3.0
    other = type(sig)(responses=tuple(bumped), best=sig.best, bank_version=sig.bank_version)
    assert signature_distance(sig, other) == 3.0


def test_distance_symmetry():
    rng = np.random.default_rng(8)
    a = signature(rng.random((5, 5)), BANK)
    b = signature(rng.random((5, 5)), BANK)
    assert signature_distance(a, b) == signature_distance(b, a)


def test_distance_bank_version_mismatch():
    sig = signature(np.zeros((5, 5)), BANK)
    other = type(sig)(responses=sig.responses, best=sig.best, bank_version="v2")
    with pytest.raises(ValueError, match="different banks"):
        signature_distance(sig, other)
