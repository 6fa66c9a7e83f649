"""End-to-end tests of the specfn CLI: exit codes, JSON shapes, and
bit-identical agreement with direct library calls through the python module."""

import json
import math
import os
import subprocess
import sys
import tempfile

CLI = sys.argv[1]
PYDIR = sys.argv[2] if len(sys.argv) > 2 else None
if PYDIR and os.path.isdir(PYDIR):
    sys.path.insert(0, PYDIR)
    import specfn
else:
    specfn = None

X = {"dim": 2, "rows": [[2.0, 1.0], [1.0, 2.0]]}
XI = {"dim": 2, "rows": [[0.0, 1.0], [1.0, 0.0]]}
DIAG24 = {"dim": 2, "rows": [[2.0, 0.0], [0.0, 4.0]]}
BAD = {"dim": 2, "rows": [[2.0, 1.0], [1.5, 2.0]]}
E2 = [{"coeff": 1.0, "exponents": [0, 1]}]

checks = 0


def run(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=e)


def expect(cond, what):
    global checks
    if not cond:
        print(f"FAIL: {what}")
        sys.exit(1)
    checks += 1


def jdump(obj, directory, name):
    path = os.path.join(directory, name)
    with open(path, "w") as fh:
        json.dump(obj, fh)
    return path


def main():
    with tempfile.TemporaryDirectory() as tmp:
        xp = jdump(X, tmp, "x.json")
        xip = jdump(XI, tmp, "xi.json")
        dp = jdump(DIAG24, tmp, "d24.json")
        badp = jdump(BAD, tmp, "bad.json")
        e2p = jdump(E2, tmp, "e2.json")

        # eval: F = psum(2) at [[2,1],[1,2]] is 10.
        r = run("eval", "-f", "psum(2)", "-m", xp)
        expect(r.returncode == 0, f"eval exit: {r.stderr}")
        out = json.loads(r.stdout)
        expect(abs(out["value"] - 10.0) < 1e-9, "eval value 10")
        expect(out["command"] == "eval", "eval echo")
        expect("eigenvalue_gaps" in out["diagnostics"], "eval diagnostics")

        # grad: logdet at diag(2,4) is diag(1/2, 1/4).
        r = run("grad", "-f", "sum(i, log(r[i]))", "-m", dp)
        expect(r.returncode == 0, f"grad exit: {r.stderr}")
        g = json.loads(r.stdout)["value"]
        expect(abs(g[0][0] - 0.5) < 1e-10 and abs(g[1][1] - 0.25) < 1e-10, "grad values")
        expect(abs(g[0][1]) < 1e-12, "grad off-diagonal")

        # dirderiv: psum(2), n=2 gives 2 ||xi||^2 = 4.
        r = run("dirderiv", "-f", "psum(2)", "-n", "2", "-m", xp, "-d", xip)
        expect(r.returncode == 0, f"dirderiv exit: {r.stderr}")
        out = json.loads(r.stdout)
        expect(abs(out["value"] - 4.0) < 1e-10, "dirderiv value")
        expect(out["diagnostics"]["mode_used"][0]["mode"] == "quotient", "dirderiv mode")

        # hess: psum(2) has H[xi] = 2 xi.
        r = run("hess", "-f", "psum(2)", "-m", xp, "-d", xip)
        expect(r.returncode == 0, "hess exit")
        h = json.loads(r.stdout)["value"]
        expect(abs(h[0][1] - 2.0) < 1e-10 and abs(h[0][0]) < 1e-10, "hess values")

        # Parameters bind through --param (repeatable).
        r = run("eval", "-f", "a * psum(2) + b", "-m", xp,
                "--param", "a=2", "--param", "b=1.5")
        expect(r.returncode == 0, f"param exit: {r.stderr}")
        expect(abs(json.loads(r.stdout)["value"] - 21.5) < 1e-9, "param value")
        r = run("eval", "-f", "a * psum(2)", "-m", xp)
        expect(r.returncode == 1, "unbound param exit code")

        # spectrum of [[2,1],[1,2]] is (3, 1).
        r = run("spectrum", "-m", xp)
        expect(r.returncode == 0, "spectrum exit")
        ev = json.loads(r.stdout)["value"]["eigenvalues"]
        expect(abs(ev[0] - 3.0) < 1e-12 and abs(ev[1] - 1.0) < 1e-12, "spectrum values")

        # lift: e_2 = det = 3 on this matrix.
        r = run("lift", "--poly", e2p, "-m", xp)
        expect(r.returncode == 0, "lift exit")
        expect(abs(json.loads(r.stdout)["value"] - 3.0) < 1e-10, "lift value")

        # Input errors exit 1 with machine-parsable stderr.
        r = run("eval", "-f", "psum(2)", "-m", badp)
        expect(r.returncode == 1, "asymmetric matrix exit code")
        err = json.loads(r.stderr)
        expect(err["error"] == "input", "asymmetric matrix error kind")

        r = run("eval", "-f", "r[1]", "-m", xp)
        expect(r.returncode == 1, "asymmetric f exit code")
        expect(json.loads(r.stderr)["error"] == "input", "asymmetric f error kind")

        r = run("eval", "-f", "logdet", "-m", jdump(
            {"dim": 2, "rows": [[1.0, 0.0], [0.0, -2.0]]}, tmp, "neg.json"))
        expect(r.returncode == 1, "domain error exit code")
        expect(json.loads(r.stderr)["error"] == "domain", "domain error kind")

        r = run("eval", "-f", "psum(2", "-m", xp)
        expect(r.returncode == 1, "syntax error exit code")
        expect("offset" in json.loads(r.stderr)["message"], "syntax error offset")

        r = run("eval", "-f", "psum(2)", "-m", os.path.join(tmp, "missing.json"))
        expect(r.returncode == 1, "missing file exit code")

        # check: a small suite runs green and reports.
        r = run("check", "--suite", "dualpath", "--trials", "50", "--seed", "11")
        expect(r.returncode == 0, f"check exit: {r.stderr[:400]}")
        rep = json.loads(r.stdout)
        expect(rep["all_pass"] is True, "check all_pass")
        expect(rep["reports"][0]["summary"]["pass_rate"] == 1.0, "check pass_rate")
        expect(rep["seed"] == 11, "check seed echo")

        # unknown suite exits 1.
        r = run("check", "--suite", "bogus")
        expect(r.returncode == 1, "unknown suite exit code")

        # SPECFN_SEED env fallback, overridden by --seed.
        r = run("check", "--suite", "newton", "--trials", "4", env={"SPECFN_SEED": "777"})
        expect(json.loads(r.stdout)["seed"] == 777, "env seed fallback")

        # Identical runs are bit-identical.
        a = run("dirderiv", "-f", "esym(2)", "-n", "2", "-m", xp, "-d", xip)
        b = run("dirderiv", "-f", "esym(2)", "-n", "2", "-m", xp, "-d", xip)
        expect(a.stdout == b.stdout, "deterministic output")

        # CLI equals direct library calls bit-for-bit.
        if specfn is not None:
            for expr, n in [("psum(2)", 2), ("psum(3)", 3), ("esym(2)", 1)]:
                r = run("dirderiv", "-f", expr, "-n", str(n), "-m", xp, "-d", xip)
                cli_value = json.loads(r.stdout)["value"]
                lib_value = specfn.dirderiv(expr, X["rows"], XI["rows"], n)
                expect(cli_value == lib_value, f"bit-identical dirderiv {expr} n={n}")
            r = run("eval", "-f", "sum(i, log(r[i]))", "-m", dp)
            expect(json.loads(r.stdout)["value"]
                   == specfn.eval_f("sum(i, log(r[i]))", DIAG24["rows"]),
                   "bit-identical eval")

    print(f"cli tests passed ({checks} checks)")


if __name__ == "__main__":
    main()
