# Copyright 2026 The fairchk Authors
# SPDX-License-Identifier: Apache-2.0

"""End-to-end checks of the fairchk command line.

Usage: cli_test.py FAIRCHK_BINARY CORPUS_DIR SCHEMA_DIR
"""

import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

BINARY = CORPUS = SCHEMAS = ""


def fairchk(*args):
    return subprocess.run([BINARY, *args], capture_output=True, text=True, timeout=60)


def corpus(name):
    return os.path.join(CORPUS, name)


def schema(name):
    with open(os.path.join(SCHEMAS, name), encoding="utf-8") as f:
        s = json.load(f)
    jsonschema.Draft202012Validator.check_schema(s)
    return jsonschema.Draft202012Validator(s)


def corpus_files():
    return sorted(f for f in os.listdir(CORPUS) if f.endswith(".ft"))


class Check(unittest.TestCase):
    def test_rank_table(self):
        r = fairchk("check", corpus("bsc.ft"))
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = {line.split()[0]: line.split()[1:] for line in r.stdout.splitlines() if "rank" in line}
        self.assertEqual(rows["Main"][:2], ["rank", "3"])
        for name in ("Buyer", "Seller", "Carrier"):
            self.assertEqual(rows[name][:2], ["rank", "0"])
        self.assertEqual(r.stdout.splitlines()[-1], "accepted")

    def test_rejected_exit_and_stderr(self):
        r = fairchk("check", corpus("session_b1.ft"))
        self.assertEqual(r.returncode, 1)
        self.assertIn("E-UNSAFE-LOOP", r.stderr)

    def test_json_validates_for_every_corpus_file(self):
        v = schema("check-report.schema.json")
        for f in corpus_files():
            for flags in ([], ["--timings"], ["--infer-branch"]):
                r = fairchk("check", corpus(f), "--json", *flags)
                self.assertIn(r.returncode, (0, 1), f)
                report = json.loads(r.stdout)
                v.validate(report)
                self.assertEqual(r.returncode == 0, report["verdict"] == "accepted", f)
                if "--timings" in flags:
                    self.assertTrue(report["timings"], f)

    def test_json_is_deterministic(self):
        a = fairchk("check", corpus("delegation.ft"), "--json").stdout
        self.assertEqual(a, fairchk("check", corpus("delegation.ft"), "--json").stdout)


class Relations(unittest.TestCase):
    def test_subtype_holds(self):
        r = fairchk("subtype", corpus("bsc.ft"), "SB", "SB'")
        self.assertEqual(r.returncode, 0)
        self.assertEqual(r.stdout.strip(), "holds, weight 1")

    def test_subtype_divergence(self):
        r = fairchk("subtype", corpus("slot.ft"), "S", "T")
        self.assertEqual(r.returncode, 1)
        self.assertTrue(r.stdout.startswith("fails: divergence at ("), r.stdout)

    def test_subtype_json(self):
        v = schema("subtype-verdict.schema.json")
        for args, holds in ((("bsc.ft", "SB", "SB'"), True), (("bsc.ft", "SB", "SBinf"), False),
                            (("slot.ft", "S", "T"), False), (("bsc.ft", "end!", "end?"), False)):
            r = fairchk("subtype", corpus(args[0]), args[1], args[2], "--json")
            out = json.loads(r.stdout)
            v.validate(out)
            self.assertEqual(out["holds"], holds, args)
            self.assertEqual(r.returncode, 0 if holds else 1)

    def test_type_expression_arguments(self):
        r = fairchk("subtype", corpus("bsc.ft"), "!{add: SB, pay: end!}", "!{pay: end!}")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(r.stdout.startswith("holds"))

    def test_compatible_and_rank(self):
        v = schema("relation.schema.json")
        r = fairchk("compatible", corpus("bsc.ft"), "SB", "SS", "--json")
        self.assertEqual(r.returncode, 0)
        out = json.loads(r.stdout)
        v.validate(out)
        self.assertEqual(out, {"compatible": True, "rank": 2, "configurations": out["configurations"]})
        r = fairchk("compatible", corpus("bsc.ft"), "SBinf", "SS", "--json")
        self.assertEqual(r.returncode, 1)
        out = json.loads(r.stdout)
        v.validate(out)
        self.assertIsNone(out["rank"])
        r = fairchk("rank", corpus("ranks.ft"), "RS", "RT", "--json")
        self.assertEqual(r.returncode, 0)
        v.validate(json.loads(r.stdout))
        self.assertEqual(json.loads(r.stdout)["rank"], 4)
        self.assertEqual(fairchk("rank", corpus("ranks.ft"), "RS", "RT").stdout.strip(), "4")

    def test_graph_output(self):
        r = fairchk("graph", corpus("bsc.ft"), "SB", "SS")
        self.assertEqual(r.returncode, 0)
        self.assertTrue(r.stdout.startswith("digraph"))
        r = fairchk("compatible", corpus("bsc.ft"), "SB", "SS", "--emit-graph", "dot")
        self.assertEqual(r.returncode, 0)
        self.assertIn("digraph", r.stdout)
        self.assertTrue(r.stdout.rstrip().endswith("compatible"))
        self.assertEqual(fairchk("graph", corpus("bsc.ft"), "SB", "SS", "--emit-graph", "png").returncode, 2)

    def test_unknown_type_is_usage_error(self):
        self.assertEqual(fairchk("subtype", corpus("bsc.ft"), "SB", "Nope").returncode, 2)


class Run(unittest.TestCase):
    def test_run_json(self):
        v = schema("run-outcome.schema.json")
        for f in corpus_files():
            if fairchk("check", corpus(f)).returncode != 0:
                continue
            r = fairchk("run", corpus(f), "--seed", "7", "--json")
            if "no parameterless entry" in r.stderr:
                self.assertEqual(r.returncode, 2)
                continue
            out = json.loads(r.stdout)
            v.validate(out)
            self.assertEqual(out["outcome"], "terminated", f)
            self.assertEqual(r.returncode, 0)

    def test_trace(self):
        r = fairchk("run", corpus("bsc.ft"), "--seed", "3", "--trace")
        self.assertEqual(r.returncode, 0)
        lines = r.stdout.splitlines()
        self.assertTrue(lines[-1].startswith("terminated after"))
        self.assertEqual(len(lines) - 1, int(lines[-1].split()[2]))
        self.assertEqual(sum("sb-cast-new" in l for l in lines), 1)

    def test_trace_json(self):
        v = schema("trace-event.schema.json")
        r = fairchk("run", corpus("bsc.ft"), "--seed", "5", "--trace-json")
        events = [json.loads(l) for l in r.stdout.splitlines() if l.startswith("{")]
        self.assertTrue(events)
        for i, e in enumerate(events, 1):
            v.validate(e)
            self.assertEqual(e["step"], i)

    def test_seed_determinism(self):
        a = fairchk("run", corpus("bsc.ft"), "--seed", "11", "--trace").stdout
        self.assertEqual(a, fairchk("run", corpus("bsc.ft"), "--seed", "11", "--trace").stdout)

    def test_rejected_program_needs_unsafe(self):
        r = fairchk("run", corpus("fwd.ft"))
        self.assertEqual(r.returncode, 1)
        self.assertIn("--unsafe", r.stderr)
        r = fairchk("run", corpus("fwd.ft"), "--unsafe", "--max-steps", "10", "--json")
        out = json.loads(r.stdout)
        schema("run-outcome.schema.json").validate(out)
        self.assertLessEqual(out["steps"], 10)

    def test_step_limit(self):
        r = fairchk("run", corpus("bsc.ft"), "--max-steps", "2", "--json")
        self.assertEqual(r.returncode, 1)
        self.assertEqual(json.loads(r.stdout), {"outcome": "step-limit", "steps": 2})


class Errors(unittest.TestCase):
    def test_parse_error(self):
        with tempfile.NamedTemporaryFile("w", suffix=".ft", delete=False) as f:
            f.write("type T = !{a: \n")
        try:
            r = fairchk("check", f.name)
            self.assertEqual(r.returncode, 2)
            self.assertIn("E-PARSE", r.stderr)
            self.assertEqual(r.stdout, "")
        finally:
            os.unlink(f.name)

    def test_missing_file(self):
        self.assertEqual(fairchk("check", corpus("does-not-exist.ft")).returncode, 2)

    def test_usage(self):
        self.assertEqual(fairchk().returncode, 2)
        self.assertEqual(fairchk("frobnicate").returncode, 2)
        self.assertEqual(fairchk("run", corpus("bsc.ft"), "--seed", "x").returncode, 2)
        self.assertEqual(fairchk("--help").returncode, 0)


if __name__ == "__main__":
    BINARY, CORPUS, SCHEMAS = sys.argv[1:4]
    unittest.main(argv=sys.argv[:1], verbosity=2)
