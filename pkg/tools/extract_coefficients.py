"""Extract the printed objective/constraint coefficients from the LaTeX source.

Writes ``tests/data/coefficients_verbatim.csv``: one row per printed term with
the coefficient string exactly as typeset (sign included), the monomial, the
transform wrapped around the expression, and an audit status. Run from the
repository root::

    python tools/extract_coefficients.py SOURCE.md
"""

import csv
import re
import sys
from pathlib import Path

OUT = Path("tests/data/coefficients_verbatim.csv")

SECTION = re.compile(r"\\subsection\{")
BLOCK = re.compile(r"\\begin\{align\*?\}(.*?)\\end\{align\*?\}", re.S)
HEAD = re.compile(r"^\s*([fg])_\{?(\d)\}?\s*(?:=\s*[^=&]*?)?=?\s*&\s*\\?\s*", re.S)
NUMBER = r"\d+(?:\.\d+)?(?:\s*\\times\s*10\^\{?-?\d+\}?)?"
TERM = re.compile(r"([+-]?)\s*(" + NUMBER + r")?\s*((?:\s*(?:\\cdot)?\s*x_\{?\d\}?(?:\^\{?\d\}?)?)*)")
FACTOR = re.compile(r"x_\{?(\d)\}?(?:\^\{?(\d)\}?)?")
TRANSFORMS = [
    (re.compile(r"^100\s*-\s*\("), "complement:100"),
    (re.compile(r"^1\s*\\times\s*10\^4\s*-\s*\("), "complement:1e4"),
    (re.compile(r"^300\s*-\s*\("), "complement:300"),
    (re.compile(r"^1\s*\\times\s*10\^\{-8\}\s*\("), "scale:1e-8"),
]


def monomial(text):
    powers = {}
    for var, exp in FACTOR.findall(text):
        powers[int(var)] = powers.get(int(var), 0) + int(exp or 1)
    return "*".join(f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in sorted(powers.items())) or "1"


def parse_body(body):
    body = body.replace("\\nonumber", " ").replace("\\\\", " ").replace("&", " ").replace("\\ ", " ")
    body = " ".join(body.split())
    transform = "none"
    for pattern, name in TRANSFORMS:
        if pattern.match(body):
            transform = name
            body = pattern.sub("", body, count=1).rstrip()
            assert body.endswith(")"), body
            body = body[:-1]
            break
    terms = []
    pos = 0
    while pos < len(body):
        m = TERM.match(body, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse at {body[pos:pos + 30]!r}")
        sign, coeff, mono = m.groups()
        if coeff or mono.strip():
            printed = sign + (" ".join(coeff.split()) if coeff else "1")
            terms.append((monomial(mono), printed))
        pos = m.end()
        while pos < len(body) and body[pos] == " ":
            pos += 1
    return transform, terms


def main(source):
    text = Path(source).read_text()
    sections = SECTION.split(text)[1:13]
    rows = []
    for k, sec in enumerate(sections, start=1):
        for block in BLOCK.findall(sec):
            for eq in re.split(r"\\end\{align\*?\}\s*\\begin\{align\*?\}", block):
                m = HEAD.match(eq)
                if not m:
                    continue
                name = f"{m.group(1)}{m.group(2)}"
                transform, terms = parse_body(eq[m.end():])
                for mono, printed in terms:
                    status = "VERBATIM"
                    stored = mono
                    if k == 9 and name == "f3" and "x4" in mono:
                        status, stored = "EDITED", mono.replace("x4", "x3")
                    rows.append([f"BTMS-{k}", name, mono, stored, printed, transform, status])
    with open(OUT, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem", "function", "printed_monomial", "stored_monomial", "printed_coefficient", "transform", "status"])
        w.writerows(rows)
    print(f"{len(rows)} rows -> {OUT}")


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit("usage: extract_coefficients.py SOURCE.md")
    main(sys.argv[1])
