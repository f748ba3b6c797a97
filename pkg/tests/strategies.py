"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from proofinfo.formula import And, Const, Not, Or, Var, rename, variables

bitstrings = st.text(alphabet="01", max_size=40)


def _formulas(max_var):
    leaves = st.one_of(
        st.integers(1, max_var).map(Var),
        st.booleans().map(Const),
    )
    return st.recursive(
        leaves,
        lambda kids: st.one_of(
            kids.map(Not),
            st.lists(kids, min_size=2, max_size=3).map(lambda cs: And(tuple(cs))),
            st.lists(kids, min_size=2, max_size=3).map(lambda cs: Or(tuple(cs))),
        ),
        max_leaves=8,
    )


def _compact(f):
    vs = sorted(variables(f))
    return rename(f, {v: i for i, v in enumerate(vs, start=1)})


def formulas(max_var=3):
    """Formulas whose variables are exactly x1..xk for some k <= max_var."""
    return _formulas(max_var).map(_compact)


clauses = st.lists(
    st.sets(st.integers(1, 4).flatmap(lambda v: st.sampled_from([v, -v])), min_size=0, max_size=3)
    .filter(lambda c: not any(-l in c for l in c)),
    min_size=1, max_size=6,
)
