#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc and tests/unicode_cases.inc.

Tables are derived from the Python runtime's unicodedata module so the
library needs no ICU dependency. Run from the repository root:

    python3 scripts/gen_unicode_tables.py
"""

import random
import sys
import unicodedata

MAX_CP = 0x110000


def iter_assigned():
    for cp in range(MAX_CP):
        ch = chr(cp)
        if unicodedata.category(ch) != "Cn":
            yield cp, ch


def lowercase_entries():
    """(cp, [lower cps...]) for every cp whose str.lower() differs."""
    simple = []
    special = []
    for cp, ch in iter_assigned():
        low = ch.lower()
        if low == ch:
            continue
        cps = [ord(c) for c in low]
        if len(cps) == 1:
            simple.append((cp, cps[0]))
        else:
            special.append((cp, cps))
    return simple, special


def ccc_entries():
    out = []
    for cp, ch in iter_assigned():
        c = unicodedata.combining(ch)
        if c:
            out.append((cp, c))
    return out


def full_canonical_decomposition(cp):
    """Recursively expanded canonical (non-compat) decomposition."""
    d = unicodedata.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    parts = [int(x, 16) for x in d.split()]
    out = []
    for p in parts:
        sub = full_canonical_decomposition(p)
        out.extend(sub if sub else [p])
    return out


SBASE, LBASE, VBASE, TBASE = 0xAC00, 0x1100, 0x1161, 0x11A7
LCOUNT, VCOUNT, TCOUNT = 19, 21, 28
SCOUNT = LCOUNT * VCOUNT * TCOUNT


def is_hangul_syllable(cp):
    return SBASE <= cp < SBASE + SCOUNT


def decomposition_entries():
    out = []
    for cp, _ in iter_assigned():
        if is_hangul_syllable(cp):
            continue  # algorithmic
        d = full_canonical_decomposition(cp)
        if d:
            out.append((cp, d))
    return out


def composition_entries():
    """Primary composites: (a, b) -> composed, exclusions filtered out."""
    out = []
    for cp, ch in iter_assigned():
        if is_hangul_syllable(cp):
            continue
        d = unicodedata.decomposition(ch)
        if not d or d.startswith("<"):
            continue
        parts = [int(x, 16) for x in d.split()]
        if len(parts) != 2:
            continue
        if unicodedata.combining(chr(parts[0])):
            continue  # non-starter decomposition
        # excluded composites do not survive an NFD -> NFC round trip
        if unicodedata.normalize("NFC", unicodedata.normalize("NFD", ch)) != ch:
            continue
        out.append((parts[0], parts[1], cp))
    out.sort()
    return out


def punct_symbol_ranges():
    ranges = []
    run = None
    for cp in range(MAX_CP):
        cat = unicodedata.category(chr(cp))
        hit = cat[0] in ("P", "S")
        if hit:
            if run is None:
                run = [cp, cp]
            else:
                run[1] = cp
        elif run is not None:
            ranges.append(tuple(run))
            run = None
    if run is not None:
        ranges.append(tuple(run))
    return ranges


def cxx_escape_utf8(s):
    return "".join("\\x%02x" % b for b in s.encode("utf-8"))


def write_tables(path):
    simple, special = lowercase_entries()
    cccs = ccc_entries()
    decomps = decomposition_entries()
    comps = composition_entries()
    ps = punct_symbol_ranges()

    buf = []
    decomp_index = []
    for cp, seq in decomps:
        decomp_index.append((cp, len(buf), len(seq)))
        buf.extend(seq)

    with open(path, "w") as f:
        w = f.write
        w("// Generated by scripts/gen_unicode_tables.py (unicodedata %s). Do not edit.\n"
          % unicodedata.unidata_version)
        w("// clang-format off\n\n")

        w("static constexpr LowerPair kLowerSimple[] = {\n")
        for cp, lo in simple:
            w("  {0x%X, 0x%X},\n" % (cp, lo))
        w("};\n\n")

        w("static constexpr LowerSpecial kLowerSpecial[] = {\n")
        for cp, cps in special:
            padded = cps + [0] * (3 - len(cps))
            w("  {0x%X, {0x%X, 0x%X, 0x%X}, %d},\n" % (cp, *padded, len(cps)))
        w("};\n\n")

        w("static constexpr CccEntry kCcc[] = {\n")
        for cp, c in cccs:
            w("  {0x%X, %d},\n" % (cp, c))
        w("};\n\n")

        w("static constexpr DecompEntry kDecomp[] = {\n")
        for cp, off, n in decomp_index:
            w("  {0x%X, %d, %d},\n" % (cp, off, n))
        w("};\n\n")

        w("static constexpr char32_t kDecompBuf[] = {\n")
        for i in range(0, len(buf), 8):
            w("  " + ", ".join("0x%X" % c for c in buf[i:i + 8]) + ",\n")
        w("};\n\n")

        w("static constexpr CompEntry kComp[] = {\n")
        for a, b, c in comps:
            w("  {0x%X, 0x%X, 0x%X},\n" % (a, b, c))
        w("};\n\n")

        w("static constexpr Range kPunctSymbol[] = {\n")
        for lo, hi in ps:
            w("  {0x%X, 0x%X},\n" % (lo, hi))
        w("};\n")
        w("// clang-format on\n")

    return len(simple), len(special), len(cccs), len(decomps), len(comps), len(ps)


APOSTROPHES = "‘’ʼʹ´`"


def preprocess_oracle(s):
    out = unicodedata.normalize("NFC", s.lower())
    for a in APOSTROPHES:
        out = out.replace(a, "'")
    return out


def write_cases(path):
    rng = random.Random(20240917)
    pools = [
        [chr(c) for c in range(0x41, 0x5B)] + [chr(c) for c in range(0x61, 0x7B)],
        [chr(c) for c in range(0xC0, 0x100) if unicodedata.category(chr(c))[0] == "L"],
        [chr(c) for c in range(0x1200, 0x135B)
         if unicodedata.category(chr(c)) != "Cn"],
        [chr(c) for c in range(0x400, 0x450)],
        [chr(c) for c in range(0x300, 0x310)],
        list(" '’‘ʼ-?!.,:´`"),
    ]
    cases = [
        "",
        "Собака @ FIRY IZAO?",
        "ó",
        "Ó",
        "İstanbul",
        "École",
        "n̈ vs ñ",
        "ነ፡ሂ",
        "ЙЙ",
        "don’t ʼyan ‘x’",
    ]
    for _ in range(240):
        n = rng.randint(1, 24)
        s = "".join(rng.choice(rng.choice(pools)) for _ in range(n))
        cases.append(s)

    with open(path, "w") as f:
        w = f.write
        w("// Generated by scripts/gen_unicode_tables.py (unicodedata %s). Do not edit.\n"
          % unicodedata.unidata_version)
        w("// {input, expected} pairs for preprocess(): lowercase + NFC + apostrophe fold.\n")
        w("// clang-format off\n")
        w("static const struct { const char* in; const char* out; } kPreprocessCases[] = {\n")
        for s in cases:
            w('  {"%s", "%s"},\n' % (cxx_escape_utf8(s), cxx_escape_utf8(preprocess_oracle(s))))
        w("};\n")
        w("// clang-format on\n")
    return len(cases)


def main():
    counts = write_tables("src/unicode_tables.inc")
    ncases = write_cases("tests/unicode_cases.inc")
    print("unicodedata", unicodedata.unidata_version, file=sys.stderr)
    print("lower=%d special=%d ccc=%d decomp=%d comp=%d ps_ranges=%d cases=%d"
          % (*counts, ncases), file=sys.stderr)


if __name__ == "__main__":
    main()
