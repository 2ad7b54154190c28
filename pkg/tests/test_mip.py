import math
import re
import shlex
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncsat import mip
from ncsat.core import Alternative, CriteriaSpec, LearningSet, extends, favorable_coalition
from ncsat.errors import BridgeError, DecodeError, FaithfulnessError, InputError, ParseError
from ncsat.synth import GenConfig, generate

try:
    import scipy  # noqa: F401
    HAVE_SCIPY = True
except ImportError:
    HAVE_SCIPY = False

HIGHS = f"{shlex.quote(sys.executable)} -m ncsat.highs {{lp}} {{sol}}"


def one_alt(value, cls, p=2):
    return LearningSet(CriteriaSpec.default(1), p, (Alternative("a1", (value,), cls),))


def truth_point(m, model, scale=1.0):
    """Values of every variable of ``m`` induced by an MR-Sort model (weights times ``scale``)."""
    data, source = m.data, m.source
    n, p = data.criteria.count, data.classes
    _, scales = mip.normalize(source)
    v = {"lambda": model.threshold * scale}
    for h in range(1, p):
        for i in range(n):
            lo, span = scales[i]
            t = model.frontiers[h - 1][i]
            if span > 0:
                b = (t - lo) / span
            else:  # every reference value was mapped to 0
                b = 0.0 if t <= lo else mip.FRONTIER_UB
            v[f"b_{h}_{i + 1}"] = min(max(b, 0.0), mip.FRONTIER_UB)
    for i in range(n):
        v[f"w_{i + 1}"] = model.weights[i] * scale
    slacks = []
    for j, (a, raw) in enumerate(zip(data.alternatives, source.alternatives), start=1):
        for k in mip._frontiers_of(a.category, p):
            votes = 0.0
            for i in range(n):
                d = 1.0 if raw.profile[i] >= model.frontiers[k - 1][i] else 0.0
                v[f"d_a{j}_{i + 1}_{k}"] = d
                v[f"c_a{j}_{i + 1}_{k}"] = d * v[f"w_{i + 1}"]
                votes += v[f"c_a{j}_{i + 1}_{k}"]
            if k == a.category - 1:
                v[f"x_a{j}"] = votes - v["lambda"]
                slacks.append(v[f"x_a{j}"])
            else:
                v[f"y_a{j}"] = v["lambda"] - votes
                slacks.append(v[f"y_a{j}"])
    if m.variant == mip.MIP_O:
        v["alpha"] = min(slacks, default=0.0)
    return v, min(slacks, default=1.0)


# -- structure

def test_terry_binary_count(terry):
    m = mip.encode_raw(terry, mip.MIP_O)
    assert m.count(mip.BINARY) == 2 * 4 * 3 + 4 * 3 == 36


def test_normalization_row_only_in_mip_o(terry):
    o = mip.encode_raw(terry, mip.MIP_O)
    d = mip.encode_raw(terry, mip.MIP_D)
    assert [c.name for c in o.constraints if c.name == "normalize"] == ["normalize"]
    assert not any(c.name == "normalize" for c in d.constraints)
    eq_one = lambda text: len(re.findall(r"^ \w+: .* = 1\.0$", text, re.M))
    assert eq_one(mip.write_lp(o)) == 1
    assert eq_one(mip.write_lp(d)) == 0


def test_mip_d_variables(terry):
    o = mip.encode_raw(terry, mip.MIP_O)
    d = mip.encode_raw(terry, mip.MIP_D)
    assert d.count(mip.CONTINUOUS) == o.count(mip.CONTINUOUS) - 1
    assert "alpha" not in d.variables and d.objective == ()
    assert o.objective == (("alpha", -1.0),)
    slack_rows = [c for c in d.constraints if c.name.startswith("slack_")]
    expected = sum((a.category >= 2) + (a.category <= 2) for a in terry.alternatives)
    assert len(slack_rows) == expected == 9
    assert all(c.sense == ">=" and c.rhs == 1.0 for c in slack_rows)


def test_rows_use_declared_variables(terry):
    for variant in (mip.MIP_O, mip.MIP_D):
        m = mip.encode_raw(terry, variant)
        assert all(v in m.variables for c in m.constraints for v, _ in c.terms)


def test_unnormalized_values_rejected(terry):
    with pytest.raises(InputError):
        mip.encode_mip_o(terry)


def test_normalize_bounds(terry):
    norm, scales = mip.normalize(terry)
    for i in range(4):
        vals = norm.values(i)
        assert vals[0] == 0.0 and vals[-1] == 1.0
    assert len(scales) == 4


# -- LP text

def test_empty_model_skeleton():
    assert mip.write_lp(mip.MipModel()) == "Minimize\n obj: 0\nSubject To\nEnd\n"


def test_lp_round_trip(terry):
    for variant in (mip.MIP_O, mip.MIP_D):
        m = mip.encode_raw(terry, variant)
        back = mip.read_lp(mip.write_lp(m))
        assert back.variables == m.variables
        assert back.constraints == m.constraints
        assert back.objective == m.objective


def test_lp_names_and_precision():
    m = mip.encode_mip_o(one_alt(0.1, 2))
    text = mip.write_lp(m)
    assert "b_1_1" in text and "d_a1_1_1" in text
    assert "- 0.1" in text or "-2.1" in text
    assert "<= -0.100001" in text  # a - b <= M d - eps with a = 0.1


@pytest.mark.parametrize("text", ["Minimize\n obj: x\nSubject To\n r: x >=\n", "Maximize\n obj: x\nEnd\n",
                                  "junk\nEnd\n"])
def test_bad_lp(text):
    with pytest.raises(ParseError):
        mip.read_lp(text)


def test_solution_text():
    assert mip.read_solution("status infeasible\n") is None
    assert mip.read_solution("# c\nx 1.5\ny 0\n") == {"x": 1.5, "y": 0.0}
    with pytest.raises(ParseError):
        mip.read_solution("x\n")
    vals = {"a": 0.1, "b": 2.0}
    assert mip.read_solution(mip.write_solution(vals)) == vals


# -- hand-checked points

def test_hand_point_micro_instance():
    m = mip.encode_mip_o(one_alt(0.7, 2))
    values = {"alpha": 0.5, "lambda": 0.5, "b_1_1": 0.2, "w_1": 1.0,
              "x_a1": 0.5, "c_a1_1_1": 1.0, "d_a1_1_1": 1.0}
    assert set(values) == set(m.variables)
    assert m.violations(values, tol=0.0) == []
    model = mip.decode_mrsort(m, values)
    assert extends(model, m.data) == []


def test_single_alternative_feasible_with_positive_alpha():
    m = mip.encode_mip_o(one_alt(0.4, 1))
    values = {"alpha": 0.5, "lambda": 0.5, "b_1_1": 0.9, "w_1": 1.0,
              "y_a1": 0.5, "c_a1_1_1": 0.0, "d_a1_1_1": 0.0}
    assert m.violations(values, tol=0.0) == []
    assert mip.decode_mrsort(m, values).assign((0.4,)) == 1


def test_missing_lambda():
    m = mip.encode_mip_o(one_alt(0.7, 2))
    with pytest.raises(DecodeError):
        mip.decode_mrsort(m, {"alpha": 0.5, "b_1_1": 0.2, "w_1": 1.0, "x_a1": 0.5,
                              "c_a1_1_1": 1.0, "d_a1_1_1": 1.0})


def test_infeasible_values():
    m = mip.encode_mip_o(one_alt(0.7, 2))
    with pytest.raises(DecodeError):
        mip.decode_mrsort(m, {"alpha": 0.5, "lambda": 0.5, "b_1_1": 0.9, "w_1": 1.0,
                              "x_a1": 0.5, "c_a1_1_1": 1.0, "d_a1_1_1": 1.0})


def test_unrepresentable_verdicts():
    m = mip.encode_mip_o(one_alt(0.7, 2))
    assert mip.unrepresentable(m, None)
    assert mip.unrepresentable(m, {"alpha": 0.0})
    assert not mip.unrepresentable(m, {"alpha": 0.5})
    assert not mip.unrepresentable(mip.encode_mip_d(one_alt(0.7, 2)), {})


def test_zero_margin_is_unfaithful():
    # feasible with alpha = 0, but a vote equal to lambda counts as sufficient
    m = mip.encode_mip_o(one_alt(0.7, 1))
    values = {"alpha": 0.0, "lambda": 1.0, "b_1_1": 0.5, "w_1": 1.0,
              "y_a1": 0.0, "c_a1_1_1": 1.0, "d_a1_1_1": 1.0}
    assert m.violations(values) == []
    with pytest.raises(FaithfulnessError):
        mip.decode_mrsort(m, values)


# -- ground-truth substitution

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(2, 3), st.integers(1, 20))
def test_ground_truth_point_is_feasible(seed, n, p, count):
    truth, data = generate(GenConfig(n, p, count, seed))
    o = mip.encode_raw(data, mip.MIP_O)
    vo, gap = truth_point(o, truth)
    if gap <= 0:  # an alternative sits exactly on the threshold
        return
    assert o.violations(vo) == []
    # same model scaled so every vote gap is at least one
    scale = 1.0 / gap
    d = mip.encode_mip_d(o.data, weight_cap=max(mip.WEIGHT_CAP, scale))
    d.source = data
    vd, gap_d = truth_point(d, truth, scale)
    assert gap_d >= 1 - 1e-9
    assert d.violations(vd) == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 20))
def test_mip_d_point_maps_to_mip_o_point(seed, n, count):
    truth, data = generate(GenConfig(n, 3, count, seed))
    o = mip.encode_raw(data, mip.MIP_O)
    _, gap = truth_point(o, truth)
    if gap <= 0:
        return
    d = mip.encode_mip_d(o.data, weight_cap=max(mip.WEIGHT_CAP, 1.0 / gap))
    d.source = data
    vd, _ = truth_point(d, truth, 1.0 / gap)
    total = sum(vd[f"w_{i}"] for i in range(1, n + 1))
    vo = {k: (val / total if k[0] in "wcxy" or k == "lambda" else val) for k, val in vd.items()}
    vo["alpha"] = min(vo[k] for k in vo if k[0] in "xy" and k[1] == "_")
    assert o.violations(vo) == []


# -- external solver

def _script(tmp_path, body):
    path = tmp_path / "fake_mip.py"
    path.write_text(body)
    return f"{shlex.quote(sys.executable)} {shlex.quote(str(path))} {{lp}} {{sol}}"


def test_template_needs_placeholders(terry):
    with pytest.raises(BridgeError):
        mip.solve_mip_external(mip.encode_raw(terry, mip.MIP_O), "solver {lp}")


def test_solver_without_output(tmp_path, terry):
    with pytest.raises(BridgeError):
        mip.solve_mip_external(mip.encode_raw(terry, mip.MIP_O), _script(tmp_path, "pass\n"))


def test_infeasible_status(tmp_path, terry):
    cmd = _script(tmp_path, "import sys; open(sys.argv[2], 'w').write('status infeasible\\n')\n")
    assert mip.solve_mip_external(mip.encode_raw(terry, mip.MIP_O), cmd) is None


@pytest.mark.skipif(not HAVE_SCIPY, reason="scipy not installed")
@pytest.mark.parametrize("variant", [mip.MIP_O, mip.MIP_D])
def test_highs_round_trip_terry(terry, variant):
    m = mip.encode_raw(terry, variant, eps=1e-4)
    values = mip.solve_mip_external(m, HIGHS)
    model = mip.decode_mrsort(m, values)
    assert extends(model, terry) == []
    if variant == mip.MIP_O:
        assert values["alpha"] > 0 and math.isclose(sum(model.weights), 1.0)


@pytest.mark.skipif(not HAVE_SCIPY, reason="scipy not installed")
def test_highs_detects_unrepresentable():
    data = LearningSet(CriteriaSpec.default(1), 2,
                       (Alternative("a", (0.2,), 2), Alternative("u", (0.8,), 1)))
    m = mip.encode_raw(data, mip.MIP_O)
    values = mip.solve_mip_external(m, HIGHS)
    # alpha = 0 stays feasible; only a positive optimum certifies a model
    assert values is None or values["alpha"] <= mip.FEAS_TOL
    assert mip.unrepresentable(m, values)
    assert mip.solve_mip_external(mip.encode_raw(data, mip.MIP_D), HIGHS) is None


def test_favorable_coalition_is_what_d_encodes(terry, terry_model):
    # d variables of the image point mirror favorable coalitions
    cover = favorable_coalition(terry.alternatives[0].profile, terry_model.frontiers[0])
    assert cover == 0b1111


def test_lambda_capped_only_in_mip_o():
    data = one_alt(0.3, 1)
    assert mip.encode_mip_o(data).variables["lambda"].ub == 1.0
    assert math.isinf(mip.encode_mip_d(data).variables["lambda"].ub)


@pytest.mark.skipif(not HAVE_SCIPY, reason="scipy not installed")
def test_highs_single_class_is_bounded():
    # nothing bounds lambda from above when every alternative is in the lowest class
    data = LearningSet(CriteriaSpec.default(1), 2,
                       (Alternative("a1", (0.3,), 1), Alternative("a2", (0.6,), 1)))
    m = mip.encode_raw(data, mip.MIP_O, eps=1e-4)
    values = mip.solve_mip_external(m, HIGHS)
    assert not mip.unrepresentable(m, values)
    assert extends(mip.decode_mrsort(m, values), data) == []


@pytest.mark.skipif(not HAVE_SCIPY, reason="scipy not installed")
def test_highs_unbounded_is_a_bridge_failure():
    m = mip.MipModel(variant=mip.MIP_O, data=one_alt(0.5, 1))
    m.add_var("alpha")
    m.objective = (("alpha", -1.0),)
    with pytest.raises(BridgeError):
        mip.solve_mip_external(m, HIGHS)
