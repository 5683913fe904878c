import pytest
from hypothesis import given, settings

from hquery import fragment as F
from hquery import transform as T
from hquery.boolfun import BoolFun, all_functions, euler, is_degenerate, parse_function
from hquery.errors import ArityError, InvalidStepError, NotFragmentableError
from hquery.fragment import HOLE, NOT, OR, Template

from conftest import functions_k


def example_leaves():
    return [parse_function(f"k 3\nformula {f}") for f in ("0&!2&3", "!1&2&3", "!0&1&3", "0&1&2")]


def test_instantiate_examples(p9):
    psi = BoolFun(2, 0b10110100)
    assert F.instantiate(Template.single(), [psi]) == psi
    leaves = example_leaves()
    assert all(is_degenerate(f) for f in leaves)
    assert F.instantiate(Template.disjunction(4), leaves) == p9
    x = BoolFun.variable(1, 0)
    assert F.instantiate(Template.disjunction(2), [x, ~x]) == BoolFun.top(1)
    with pytest.raises(ArityError):
        F.instantiate(Template.disjunction(2), [x])


def test_determinism_examples():
    assert F.check_instantiation_determinism(Template.disjunction(4), example_leaves())
    x = BoolFun.variable(1, 0)
    assert F.check_instantiation_determinism(Template.disjunction(2), [x, ~x])
    self_or = Template(((HOLE, 0), (OR, (0, 0))))
    assert not F.check_instantiation_determinism(self_or, [BoolFun.top(1)])


def test_golden_fragmentation(p9):
    frag = F.Fragmentation(Template.disjunction(4), tuple(example_leaves()))
    assert frag.is_valid(p9)
    assert F.structural_euler(frag) == 0
    assert frag.template.count(NOT) == 0


def test_from_trace_shapes():
    bot = BoolFun.bottom(2)
    empty = F.fragment_from_trace(T.RewriteTrace(bot))
    assert empty.template == Template.single() and empty.function() == bot
    # all-PLUS trace: one OR over every hole
    steps = (T.RewriteStep("+", 0, 0), T.RewriteStep("+", 0b110, 0), T.RewriteStep("+", 0b010, 0))
    frag = F.fragment_from_trace(T.RewriteTrace(bot, steps))
    assert frag.template.depth() == 1 and frag.template.count(OR) == 1
    assert frag.template.hole_count == 4
    assert frag.is_valid(T.apply_steps(bot, steps))
    with pytest.raises(InvalidStepError):
        F.fragment_from_trace(T.RewriteTrace(BoolFun.top(1)))


def test_minus_shape():
    bot = BoolFun.bottom(1)
    steps = (T.RewriteStep("+", 0, 0), T.RewriteStep("-", 0, 0))
    frag = F.fragment_from_trace(T.RewriteTrace(bot, steps))
    # !(!(H0 | H1) | H2)
    assert frag.template.to_expr() == "!(!(H0 | H1) | H2)"
    assert frag.is_valid(bot)


def test_no_pm_needs_negation(no_pm):
    frag = F.fragment(no_pm)
    assert frag.is_valid(no_pm)
    assert frag.template.count(NOT) > 0


def test_fragment_examples(p9):
    assert F.fragment(p9).is_valid(p9)
    with pytest.raises(NotFragmentableError) as ei:
        F.fragment(BoolFun.from_sat(1, [[0, 1]]))
    assert ei.value.euler == 1
    for phi in all_functions(2):
        if is_degenerate(phi):
            assert F.fragment(phi).is_valid(phi)


def test_fragmentable_iff_euler_zero():
    for k in (1, 2):
        for phi in all_functions(k):
            if euler(phi) == 0:
                frag = F.fragment(phi)
                assert frag.is_valid(phi)
                assert F.structural_euler(frag) == 0
                assert all(euler(l) == 0 for l in frag.leaves)
            else:
                with pytest.raises(NotFragmentableError):
                    F.fragment(phi)


@settings(max_examples=80, deadline=None)
@given(functions_k(3))
def test_fragment_k3(phi):
    if euler(phi) == 0:
        assert F.fragment(phi).is_valid(phi)


def test_template_validation():
    with pytest.raises(ValueError):
        Template(((HOLE, 1),))
    with pytest.raises(ValueError):
        Template(((NOT, 0),))
    with pytest.raises(ValueError):
        Template(((HOLE, 0), ("and", (0,))))


def test_format(p9):
    text = F.format_fragmentation(F.fragment(p9))
    assert text.startswith("template ") and "H0 k 3 sat" in text
