import pytest

from jsoniqml.builtins import CATALOG
from jsoniqml.errors import ResolutionError
from jsoniqml.parser import parse
from jsoniqml.resolver import resolve


def do_resolve(text):
    return resolve(parse(text), set(CATALOG.keys()))


class TestResolution:
    def test_builtin_call(self):
        resolved = do_resolve('tokenize("a b", " ")')
        assert ("call", "tokenize#2", "builtin") in resolved.binding_table

    def test_user_call(self):
        resolved = do_resolve(
            "declare function local:convert($input) { $input }\nlocal:convert(1)"
        )
        assert ("call", "local:convert#1", "user") in resolved.binding_table

    def test_unknown_function(self):
        with pytest.raises(ResolutionError) as err:
            do_resolve("local:missing(1)")
        assert err.value.code == "UNKNOWN_FUNCTION"

    def test_arity_distinguishes(self):
        with pytest.raises(ResolutionError) as err:
            do_resolve("tokenize(1)")
        assert err.value.code == "UNKNOWN_FUNCTION"

    def test_free_variables_become_external(self):
        resolved = do_resolve("$training-input")
        assert resolved.external_vars == {"training-input"}

    def test_cyclic_let_rejected(self):
        with pytest.raises(ResolutionError) as err:
            do_resolve("let $a := $b let $b := $a return 1")
        assert err.value.code == "UNDEFINED_VARIABLE"

    def test_forward_reference_rejected(self):
        with pytest.raises(ResolutionError) as err:
            do_resolve("let $a := $b let $b := 1 return $a")
        assert err.value.code == "UNDEFINED_VARIABLE"

    def test_let_shadows_previous_binding(self):
        resolved = do_resolve("let $x := 1 let $x := $x + 1 return $x")
        assert resolved.external_vars == set()

    def test_context_outside_predicate_rejected(self):
        with pytest.raises(ResolutionError):
            do_resolve("$$.label")

    def test_function_params_visible_only_inside(self):
        resolved = do_resolve("declare function local:f($x) { $x }\n$x")
        assert resolved.external_vars == {"x"}

    def test_deterministic_binding_table(self):
        text = (
            "declare function local:f($x) { tokenize($x, \" \") }\n"
            "for $i in 1 to 3 let $t := local:f(\"a b\") return count($t)"
        )
        first = do_resolve(text).binding_table
        second = do_resolve(text).binding_table
        assert first == second
