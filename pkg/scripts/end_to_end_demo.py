"""End-to-end demo: clean messy text, train a linear SVM pipeline, score it.

Generates a synthetic messy dataset, runs the full declarative program
(tokenize, label, featurize, validate to a frame, assemble vectors, fit,
predict, compute accuracy), and reports accuracy plus wall-clock time.

Usage:
    python scripts/end_to_end_demo.py --n-train 2000 --n-test 500 --d 64
"""

import argparse
import sys
import tempfile
import time
from pathlib import Path

from jsoniqml.datagen import generate_dataset
from jsoniqml.engine import run_query_lines

PROGRAM_TEMPLATE = """\
declare function local:convert($input)
{{
 annotate(
  for $l in unparsed-text-lines($input)
  let $tokens := tokenize ($l, " ")
  let $left := head($tokens)
  let $right := tail($tokens)
  let $label := if (contains($left, "indoor"))
         then 0
         else 1
  let $features := {{|
    for $i at $p in $right
    return {{ string($p) : $i }}
  |}}
  return {{ "label" : $label, "features" : $features }},
  {{
    "label" : "string",
    "features" : {{|
      for $i in 1 to {d}
      return {{ string($i) : "double" }}
    |}}
  }}
 )
}};
let $training-data := local:convert($training-input)
let $test-data := local:convert($test-input)
let $vector-assembler := get-transformer(
  "VectorAssembler",
  {{ "inputCols" : ["features"], "outputCol" : "transformedFeatures" }})
let $linearsvc := get-estimator(
  "LinearSVC",
  {{ "featuresCol": "transformedFeatures", "maxIter": {max_iter} }})
let $pipeline := get-estimator(
  "Pipeline",
  {{ "stages": [$vector-assembler, $linearsvc] }})
let $pip := $pipeline($training-data, {{}})
let $prediction := $pip($test-data, {{}})
let $total := count($prediction)
return count($prediction[$$.label eq $$.prediction])
        div $total
"""


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-train", type=int, default=2000)
    parser.add_argument("--n-test", type=int, default=500)
    parser.add_argument("--d", type=int, default=64)
    parser.add_argument("--margin", type=float, default=1.0)
    parser.add_argument("--max-iter", type=int, default=5)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--mode", default="auto", choices=("auto", "frame", "force-local"))
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        train = Path(tmp) / "train.txt"
        test = Path(tmp) / "test.txt"
        generate_dataset(args.n_train, args.d, args.margin, args.seed, train)
        generate_dataset(args.n_test, args.d, args.margin, args.seed + 1, test)

        program = PROGRAM_TEMPLATE.format(d=args.d, max_iter=args.max_iter)
        started = time.monotonic()
        lines = run_query_lines(
            program,
            {"training-input": str(train), "test-input": str(test)},
            policy=args.mode,
        )
        elapsed = time.monotonic() - started

    print(f"rows: {args.n_train} train / {args.n_test} test, d={args.d}")
    print(f"accuracy: {lines[0]}")
    print(f"elapsed: {elapsed:.2f}s ({args.mode} mode)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
