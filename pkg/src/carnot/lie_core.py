"""Stratified Lie algebras given by structure constants.

A group spec file declares a name, the layer dimensions of a stratification
g = V_1 + ... + V_s, and the brackets [X_i, X_j] for i < j on a basis
adapted to the layers.  Structure constants are exact rationals; the
antisymmetric half is completed automatically.  The Carnot group itself is
implicit: everything downstream works in exponential coordinates derived
from these constants.
"""

import re
from dataclasses import dataclass

from .linalg import Q, ZERO, from_columns, rank


class GroupSpecError(ValueError):
    """Raised on malformed group spec input; message carries the location."""


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_TERM_RE = re.compile(r"^(?P<coeff>[+-]?\d+(?:/\d+)?)\*X(?P<index>\d+)$")


class StratifiedAlgebra:
    """A stratified Lie algebra on an adapted basis X_1 .. X_n.

    Immutable after construction.  Fields:
      name        -- label from the spec file
      n           -- dimension
      s           -- step (number of layers)
      layer_dims  -- tuple of layer dimensions (dim V_1, ..., dim V_s)
      weight_of   -- tuple, weight_of[l] = i iff X_{l+1} lies in V_i (0-based l)
      brackets    -- {(i, j): {k: coeff}} for i < j, 0-based, sparse

    Indices are 0-based internally; the file format and reports are 1-based.
    """

    def __init__(self, name, layer_dims, brackets):
        self.name = name
        self.layer_dims = tuple(int(d) for d in layer_dims)
        self.s = len(self.layer_dims)
        self.n = sum(self.layer_dims)
        weight_of = []
        for i, d in enumerate(self.layer_dims, start=1):
            weight_of.extend([i] * d)
        self.weight_of = tuple(weight_of)
        table = {}
        for (i, j), comps in brackets.items():
            comps = {k: Q(c) for k, c in comps.items() if Q(c) != 0}
            if comps:
                table[(i, j)] = comps
        self.brackets = table
        layers = []
        start = 0
        for d in self.layer_dims:
            layers.append(tuple(range(start, start + d)))
            start += d
        self.layers = tuple(layers)

    def bracket(self, i, j):
        """[X_i, X_j] as a sparse {k: coeff} dict (0-based, any i, j)."""
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def structure_constant(self, i, j, k):
        return self.bracket(i, j).get(k, ZERO)

    def bracket_vectors(self, u, v):
        """Bracket of two coefficient vectors, [sum u_i X_i, sum v_j X_j].

        Entries may be rationals or anything with +, * (e.g. polynomials);
        returns a dense list of length n.
        """
        out = [None] * self.n
        for (i, j), comps in self.brackets.items():
            ui, uj, vi, vj = u[i], u[j], v[i], v[j]
            coeff = ui * vj - uj * vi
            for k, c in comps.items():
                term = coeff * c
                out[k] = term if out[k] is None else out[k] + term
        return [ZERO if x is None else x for x in out]

    def __repr__(self):
        return "StratifiedAlgebra(%r, layers=%r, %d brackets)" % (
            self.name, list(self.layer_dims), len(self.brackets))


def parse_group_spec(text):
    """Parse a group spec document into a StratifiedAlgebra.

    Raises GroupSpecError with line/column information on syntax errors,
    duplicate brackets, out-of-range indices or empty layers.
    """
    name = None
    layer_dims = None
    brackets = {}
    seen_pairs = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GroupSpecError("line %d: expected 'key = value', got %r" % (lineno, raw.strip()))
        lhs, rhs = (part.strip() for part in line.split("=", 1))
        if lhs == "name":
            name = rhs
        elif lhs == "layers":
            layer_dims = _parse_layers(rhs, lineno)
        else:
            i, j = _parse_bracket_lhs(lhs, lineno)
            if layer_dims is None:
                raise GroupSpecError("line %d: bracket entry before 'layers'" % lineno)
            n = sum(layer_dims)
            if not (0 <= i < n and 0 <= j < n):
                raise GroupSpecError("line %d: basis index out of range 1..%d" % (lineno, n))
            if (i, j) in seen_pairs or (j, i) in seen_pairs:
                raise GroupSpecError("line %d: duplicate bracket entry X%d X%d" % (lineno, i + 1, j + 1))
            if i >= j:
                raise GroupSpecError("line %d: bracket entries must have i < j (antisymmetry is implied)" % lineno)
            seen_pairs.add((i, j))
            comps = _parse_bracket_rhs(rhs, n, lineno)
            if comps:
                brackets[(i, j)] = comps
    if name is None:
        raise GroupSpecError("missing required key 'name'")
    if layer_dims is None:
        raise GroupSpecError("missing required key 'layers'")
    return StratifiedAlgebra(name, layer_dims, brackets)


def _parse_layers(rhs, lineno):
    if not (rhs.startswith("[") and rhs.endswith("]")):
        raise GroupSpecError("line %d: layers must look like [2, 1]" % lineno)
    body = rhs[1:-1].strip()
    if not body:
        raise GroupSpecError("line %d: at least one layer required" % lineno)
    dims = []
    for col, piece in enumerate(body.split(",")):
        piece = piece.strip()
        if not piece.isdigit():
            raise GroupSpecError("line %d: layer entry %d is not a positive integer: %r" % (lineno, col + 1, piece))
        d = int(piece)
        if d == 0:
            raise GroupSpecError("line %d: zero-dimensional layer %d before the step" % (lineno, col + 1))
        dims.append(d)
    return dims


def _parse_bracket_lhs(lhs, lineno):
    parts = lhs.split()
    if len(parts) != 2 or not all(p.startswith("X") and p[1:].isdigit() for p in parts):
        raise GroupSpecError("line %d: expected 'Xi Xj' on the left, got %r" % (lineno, lhs))
    return int(parts[0][1:]) - 1, int(parts[1][1:]) - 1


def _parse_bracket_rhs(rhs, n, lineno):
    comps = {}
    for pos, term in enumerate(rhs.split("+")):
        term = term.replace(" ", "")
        if not term:
            raise GroupSpecError("line %d: empty term %d on the right-hand side" % (lineno, pos + 1))
        m = _TERM_RE.match(term)
        if m is None:
            raise GroupSpecError(
                "line %d: term %d must look like 'q*Xk' with q a rational literal, got %r"
                % (lineno, pos + 1, term))
        coeff = m.group("coeff")
        if not _RATIONAL_RE.match(coeff):
            raise GroupSpecError("line %d: not a rational literal: %r" % (lineno, coeff))
        k = int(m.group("index")) - 1
        if not (0 <= k < n):
            raise GroupSpecError("line %d: basis index X%d out of range 1..%d" % (lineno, k + 1, n))
        if k in comps:
            comps[k] = comps[k] + Q(coeff)
        else:
            comps[k] = Q(coeff)
    return {k: c for k, c in comps.items() if c != 0}


def serialize_group_spec(alg):
    """Canonical group spec text; parse(serialize(alg)) reproduces alg."""
    lines = ["name = %s" % alg.name,
             "layers = [%s]" % ", ".join(str(d) for d in alg.layer_dims)]
    for (i, j) in sorted(alg.brackets):
        terms = " + ".join("%s*X%d" % (c, k + 1) for k, c in sorted(alg.brackets[(i, j)].items()))
        lines.append("X%d X%d = %s" % (i + 1, j + 1, terms))
    return "\n".join(lines) + "\n"


@dataclass
class ValidationReport:
    valid: bool
    failures: list

    def __str__(self):
        if self.valid:
            return "valid Carnot grading"
        return "invalid stratification:\n" + "\n".join("  - " + f for f in self.failures)


def validate_stratification(alg):
    """Check the Carnot grading axioms; failures are report content."""
    failures = []
    n = alg.n

    for (i, j), comps in alg.brackets.items():
        for k, c in comps.items():
            if alg.weight_of[k] != alg.weight_of[i] + alg.weight_of[j]:
                failures.append(
                    "grading violated: [X%d, X%d] has a X%d component "
                    "(weights %d + %d != %d)"
                    % (i + 1, j + 1, k + 1, alg.weight_of[i], alg.weight_of[j], alg.weight_of[k]))

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                acc = {}
                for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = alg.bracket(b, c)
                    for m, coeff in inner.items():
                        for q, outer in alg.bracket(a, m).items():
                            acc[q] = acc.get(q, ZERO) + coeff * outer
                bad = {q: v for q, v in acc.items() if v != 0}
                if bad:
                    failures.append(
                        "Jacobi identity fails on (X%d, X%d, X%d): residue %s"
                        % (i + 1, j + 1, k + 1,
                           " + ".join("%s*X%d" % (v, q + 1) for q, v in sorted(bad.items()))))

    for i in range(1, alg.s):
        target = alg.layers[i]
        vectors = []
        for a in alg.layers[0]:
            for b in alg.layers[i - 1]:
                comps = alg.bracket(a, b)
                vec = [comps.get(k, ZERO) for k in target]
                if any(vec):
                    vectors.append(vec)
        got = rank(from_columns(vectors, len(target))) if vectors else 0
        if got < len(target):
            failures.append(
                "generation fails: [V1, V%d] spans only %d of the %d dimensions of V%d"
                % (i, got, len(target), i + 1))

    return ValidationReport(valid=not failures, failures=failures)


def hausdorff_dimension(alg):
    """Homogeneous dimension sum_i i * dim V_i; also the top covector weight."""
    return sum(i * d for i, d in enumerate(alg.layer_dims, start=1))
