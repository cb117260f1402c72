import hypothesis.strategies as st
from hypothesis import settings

from jsoniqml.items import NULL, ArrayItem, AtomicValue, ObjectItem

settings.register_profile("suite", max_examples=50, deadline=None)
settings.load_profile("suite")


# Items whose canonical JSON text round-trips through the item parser.
# Dates, timestamps, and binaries serialize as plain strings, so they are
# generated only in kind-specific tests.

json_atoms = st.one_of(
    st.integers(-(10**9), 10**9).map(lambda v: AtomicValue("integer", v)),
    st.booleans().map(lambda v: AtomicValue("boolean", v)),
    st.just(NULL),
    st.floats(allow_nan=False, allow_infinity=False, width=64).map(
        lambda v: AtomicValue("double", v)
    ),
    st.decimals(
        min_value=-(10**6), max_value=10**6, allow_nan=False, allow_infinity=False, places=6
    ).map(lambda v: AtomicValue("decimal", v)),
    st.text(max_size=12).map(lambda v: AtomicValue("string", v)),
)


def _containers(children):
    return st.one_of(
        st.lists(children, max_size=4).map(ArrayItem),
        st.dictionaries(st.text(max_size=8), children, max_size=4).map(ObjectItem),
    )


json_items = st.recursive(json_atoms, _containers, max_leaves=12)
