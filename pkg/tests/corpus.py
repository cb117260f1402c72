"""Mode-equivalence query corpus.

Queries here must produce identical canonical output under every mode
policy (at sizes below the cap), and together they cover every grammar
production. ML builtins are deliberately absent: transformers demand a
physical frame, which the force-local policy never produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

MESSY_LINES = (
    "animal:0.7420,outdoor:0.9710,pet:0.6130,white:0.6790 -4.893 -3.803 -25.799\n"
    "animal:0.1234,indoor:0.3413,pet:0.6130,black:0.87534 -8.311 15.133 2.973\n"
)


@dataclass(frozen=True)
class CorpusQuery:
    name: str
    text: str
    # written to a temp file and bound to $input when present
    input_text: Optional[str] = None


ANNOTATE_SMALL = """
let $d := annotate(
  for $i in 1 to 20
  return { "label" : $i mod 2, "v" : $i * 1.5 },
  { "label" : "int", "v" : "double" })
return count($d[$$.label eq 1])
"""

ANNOTATE_WHERE = """
let $d := annotate(
  for $i in 1 to 12
  return { "k" : $i, "v" : $i * 2.5 },
  { "k" : "int", "v" : "double" })
for $r in $d
where $r.v gt 10.0
return $r
"""

CONVERT_COUNT = """
declare function local:keep($line) {
  if (contains($line, "indoor")) then 0 else 1
};
let $d := annotate(
  for $l in unparsed-text-lines($input)
  let $tokens := tokenize($l, " ")
  return { "label" : local:keep(head($tokens)), "first" : head(tail($tokens)) },
  { "label" : "int", "first" : "double" })
return count($d[$$.label eq 1])
"""

CORPUS: "list[CorpusQuery]" = [
    CorpusQuery("arith-add", "1 + 1"),
    CorpusQuery("arith-precedence", "7 - 2 * 3"),
    CorpusQuery("arith-idiv", "7 idiv 2"),
    CorpusQuery("arith-mod", "7 mod 2"),
    CorpusQuery("arith-div", "7 div 2"),
    CorpusQuery("range", "1 to 5"),
    CorpusQuery("flwor-square", "for $i in 1 to 5 return $i * $i"),
    CorpusQuery(
        "flwor-at-computed-key",
        'for $i at $p in 3 to 5 return { string($p) : $i }',
    ),
    CorpusQuery("flwor-let", "let $x := 10 return $x + 5"),
    CorpusQuery("flwor-where", "for $i in 1 to 10 where ($i mod 2) eq 0 return $i"),
    CorpusQuery("flwor-order-desc", "for $i in 1 to 5 order by $i descending return $i"),
    CorpusQuery(
        "flwor-order-stable",
        "for $i in 1 to 6 order by $i mod 2 ascending return $i",
    ),
    CorpusQuery("if-then-else", 'if (1 lt 2) then "yes" else "no"'),
    CorpusQuery(
        "comparisons",
        '[1 eq 1, 1 ne 2, 1 le 1, 2 gt 1, 2 ge 3, "a" lt "b"]',
    ),
    CorpusQuery("literals", '{ "a" : 1, "b" : [2.5, null, true, false], "c" : 1.5e0 }'),
    CorpusQuery(
        "merged-constructor",
        '{| for $i in 1 to 3 return { string($i) : 0.0 } |}',
    ),
    CorpusQuery("empty-sequence", "count(())"),
    CorpusQuery("parenthesized", "(1) + (2)"),
    CorpusQuery(
        "predicate-context",
        'let $r := (for $i in 1 to 4 return {"v": $i}) return count($r[$$.v ge 3])',
    ),
    CorpusQuery("lookup-chain", '{"a": {"b": 7}}.a.b'),
    CorpusQuery(
        "lookup-mapped",
        '(for $i in 1 to 3 return {"v": $i}).v',
    ),
    CorpusQuery(
        "user-function",
        "declare function local:twice($x) { $x * 2 }\nlocal:twice(21)",
    ),
    CorpusQuery(
        "recursion",
        "declare function local:fact($n) { if ($n le 1) then 1 else $n * local:fact($n - 1) }\n"
        "local:fact(6)",
    ),
    CorpusQuery(
        "mutual-recursion",
        "declare function local:even($n) { if ($n eq 0) then true else local:odd($n - 1) };\n"
        "declare function local:odd($n) { if ($n eq 0) then false else local:even($n - 1) };\n"
        "[local:even(10), local:odd(7)]",
    ),
    CorpusQuery(
        "named-ref-dynamic-call",
        "declare function local:inc($x) { $x + 1 }\n"
        "let $f := local:inc#1 return $f(41)",
    ),
    CorpusQuery(
        "string-builtins",
        'let $t := tokenize("x y z", " ") return [head($t), tail($t), count($t), '
        'contains("hello", "ell"), string(42)]',
    ),
    CorpusQuery(
        "boolean-logic",
        'if ((1 lt 2) and (not (3 lt 2)) or (1 eq 2)) then "t" else "f"',
    ),
    CorpusQuery("annotate-count", ANNOTATE_SMALL),
    CorpusQuery("annotate-where-rows", ANNOTATE_WHERE),
    CorpusQuery(
        "annotate-date",
        'annotate(for $i in 1 to 2 return { "d" : "2021-01-05" }, { "d" : "date" })',
    ),
    CorpusQuery("decimals", "[1.5 + 2.5, 10 div 4, 7.5e0, 0.5 * 4]"),
    CorpusQuery(
        "order-strings",
        'for $s in tokenize("pear apple fig", " ") order by $s descending return $s',
    ),
    CorpusQuery("comments", "(: doc :) 1 + (: inner (: nested :) :) 2"),
    CorpusQuery("text-lines", CONVERT_COUNT, input_text=MESSY_LINES),
]
