"""The anticommutator spin algebra: relation checks, characters and automorphisms.

Generators are ``x, y, z`` with ``xy + yx = 2z``, ``yz + zy = 2x`` and
``zx + xz = 2y``.  The index set ``{0, x, y, z}`` labels the characters
``f_n``, the elements ``h_n`` and the points permuted by the automorphism
group ``G`` (isomorphic to S4).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations

from .linalg import Matrix

GENERATORS = ("x", "y", "z")
INDEX = ("0", "x", "y", "z")

# values of f_n on (x, y, z)
CHARACTERS = {
    "0": (1, 1, 1),
    "x": (1, -1, -1),
    "y": (-1, 1, -1),
    "z": (-1, -1, 1),
}

# h_n as coefficients on (x, y, z); the same sign table as the characters
H_COEFFS = CHARACTERS


def check_index(n) -> str:
    n = str(n)
    if n not in INDEX:
        raise ValueError(f"index symbol must be one of 0, x, y, z; got {n!r}")
    return n


def check_generator(g) -> str:
    g = str(g)
    if g not in GENERATORS:
        raise ValueError(f"generator must be one of x, y, z; got {g!r}")
    return g


def hat(a: str, n: str) -> int:
    """``1`` when ``n`` is ``0`` or ``a``, otherwise ``-1``."""
    a, n = check_generator(a), check_index(n)
    return 1 if n in ("0", a) else -1


@dataclass(frozen=True)
class Character:
    n: str
    x: int
    y: int
    z: int

    def value(self, g: str) -> int:
        return getattr(self, check_generator(g))

    def on_word(self, word: str) -> int:
        out = 1
        for g in word:
            out *= self.value(g)
        return out


def character(n) -> Character:
    n = check_index(n)
    return Character(n, *CHARACTERS[n])


# relations -------------------------------------------------------------


@dataclass
class RelationReport:
    residuals: dict[str, Matrix]

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def failing(self) -> list[str]:
        return [k for k, r in self.residuals.items() if not r.is_zero()]


def _same_order(*mats: Matrix) -> None:
    orders = {m.order for m in mats}
    if len(orders) != 1:
        raise ValueError(f"matrices have different orders {sorted(orders)}")


def check_relations_xyz(X: Matrix, Y: Matrix, Z: Matrix) -> RelationReport:
    _same_order(X, Y, Z)
    XY, YX = X @ Y, Y @ X
    YZ, ZY = Y @ Z, Z @ Y
    ZX, XZ = Z @ X, X @ Z
    return RelationReport(
        {
            "xy+yx-2z": XY + YX - Z * 2,
            "yz+zy-2x": YZ + ZY - X * 2,
            "zx+xz-2y": ZX + XZ - Y * 2,
        }
    )


def check_relations_xy(X: Matrix, Y: Matrix) -> RelationReport:
    """The two cubic relations left after eliminating ``z``."""
    _same_order(X, Y)
    XX, YY = X @ X, Y @ Y
    XY = X @ Y
    YX = Y @ X
    return RelationReport(
        {
            "x2y+2xyx+yx2-4y": XX @ Y + XY @ X * 2 + Y @ XX - Y * 4,
            "y2x+2yxy+xy2-4x": YY @ X + YX @ Y * 2 + X @ YY - X * 4,
        }
    )


def h_matrix(n, X: Matrix, Y: Matrix, Z: Matrix) -> Matrix:
    cx, cy, cz = H_COEFFS[check_index(n)]
    return X * cx + Y * cy + Z * cz


# automorphisms -------------------------------------------------------------

_K_FLIP = {"x": ("y", "z"), "y": ("x", "z"), "z": ("x", "y")}


def _rho_perm(a: str) -> dict[str, str]:
    # the permutation (0 a)(b c), or the identity for a == 0
    if a == "0":
        return {n: n for n in INDEX}
    b, c = _K_FLIP[a]
    return {"0": a, a: "0", b: c, c: b}


@dataclass(frozen=True)
class Automorphism:
    """An element of G stored by its permutation of ``{0,x,y,z}``.

    ``images[g] = (target, sign)`` means ``g -> sign * target``.
    """

    perm: tuple  # images of 0, x, y, z in that order
    images: tuple  # ((target, sign) for g in x, y, z)

    @classmethod
    def from_perm(cls, perm) -> Automorphism:
        p = {check_index(k): check_index(v) for k, v in dict(perm).items()}
        if set(p) != set(INDEX) or set(p.values()) != set(INDEX):
            raise ValueError(f"not a permutation of 0, x, y, z: {perm!r}")
        a = p["0"]
        rho = _rho_perm(a)
        # p = rho . s with s fixing 0; rho is an involution
        s = {n: rho[p[n]] for n in INDEX}
        images = []
        for g in GENERATORS:
            t = s[g]
            sign = 1 if a == "0" or t == a else -1
            images.append((t, sign))
        return cls(tuple(p[n] for n in INDEX), tuple(images))

    @classmethod
    def from_cycles(cls, text: str) -> Automorphism:
        return cls.from_perm(parse_cycles(text))

    @classmethod
    def identity(cls) -> Automorphism:
        return cls.from_perm({n: n for n in INDEX})

    @classmethod
    def rho(cls, n) -> Automorphism:
        return cls.from_perm(_rho_perm(check_index(n)))

    @property
    def perm_map(self) -> dict[str, str]:
        return dict(zip(INDEX, self.perm))

    def image(self, g: str) -> tuple[str, int]:
        return self.images[GENERATORS.index(check_generator(g))]

    def __call__(self, n: str) -> str:
        return self.perm_map[check_index(n)]

    def compose(self, other: Automorphism) -> Automorphism:
        """``self after other`` on the algebra."""
        images = []
        for g in GENERATORS:
            t, s = other.image(g)
            t2, s2 = self.image(t)
            images.append((t2, s * s2))
        pm, om = self.perm_map, other.perm_map
        return Automorphism(tuple(pm[om[n]] for n in INDEX), tuple(images))

    def __mul__(self, other: Automorphism) -> Automorphism:
        return self.compose(other)

    def inverse(self) -> Automorphism:
        pm = self.perm_map
        return Automorphism.from_perm({v: k for k, v in pm.items()})

    def sign_vector(self) -> tuple[int, int, int]:
        return tuple(s for _, s in self.images)

    def apply(self, mats: dict[str, Matrix]) -> dict[str, Matrix]:
        """Evaluate the images of ``x, y, z`` on matrices ``mats``."""
        return {g: mats[t] * s for g, (t, s) in zip(GENERATORS, self.images)}

    def cycles(self) -> str:
        return format_cycles(self.perm_map)

    def to_json(self) -> dict:
        return {"perm": self.perm_map}

    @classmethod
    def from_json(cls, obj) -> Automorphism:
        if not isinstance(obj, dict) or "perm" not in obj:
            raise ValueError("automorphism JSON needs a 'perm' object")
        return cls.from_perm(obj["perm"])

    def __str__(self):
        return self.cycles()


def all_automorphisms() -> list[Automorphism]:
    return [Automorphism.from_perm(dict(zip(INDEX, p))) for p in permutations(INDEX)]


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> dict[str, str]:
    """Parse cycle notation such as ``"(0 x)(y z)"``; ``"()"`` is the identity."""
    stripped = text.strip()
    if not stripped:
        raise ValueError("empty permutation")
    if _CYCLE.sub("", stripped).strip():
        raise ValueError(f"malformed cycle notation: {text!r}")
    perm = {n: n for n in INDEX}
    seen: set[str] = set()
    for body in _CYCLE.findall(stripped):
        symbols = [s for s in re.split(r"[\s,]+|(?<=\S)(?=\S)", body.strip()) if s]
        for s in symbols:
            check_index(s)
            if s in seen:
                raise ValueError(f"symbol {s} repeated in {text!r}")
            seen.add(s)
        for i, s in enumerate(symbols):
            perm[s] = symbols[(i + 1) % len(symbols)]
    return perm


def format_cycles(perm: dict[str, str]) -> str:
    out, seen = [], set()
    for start in INDEX:
        if start in seen or perm[start] == start:
            continue
        cyc, n = [], start
        while n not in seen:
            seen.add(n)
            cyc.append(n)
            n = perm[n]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "()"
