"""Arithmetic over F_p and the Baby Jubjub prime-order subgroup.

All protocol values live on the twisted Edwards curve a*x^2 + y^2 = 1 + d*x^2*y^2
over the 254-bit prime field whose order equals the scalar field of the alt_bn128
pairing curve, so statements stay native to an on-chain proof verifier. Points
carry affine coordinates; scalar multiplication runs internally in extended
coordinates to avoid per-step inversions.
"""

from __future__ import annotations

# Base field modulus (254-bit prime) and the prime order of the Baby Jubjub
# subgroup (cofactor 8). Taken from the published curve parameters.
P = 21888242871839275222246405745257275088548364400416034343698204186575808495617
Q = 2736030358979909402780800718157159386076813972158567259200215660948447373041
A = 168700
D = 168696

# Maximum number of bits that fit in one field element without overflow.
KAPPA = P.bit_length() - 1  # 253
HALF_P = (P - 1) // 2

GENERATOR_X = 5299619240641551281634865583518297030282874472190772894086521144482721001553
GENERATOR_Y = 16950150798460657717958625567821834550301663161624707787222815936182638968203


class NotAPointError(ValueError):
    """Raised when coordinates or a compact encoding do not describe a curve point."""


class _PrimeFieldElement:
    """Immutable residue modulo a prime, kept in canonical form [0, modulus)."""

    modulus: int = 0
    __slots__ = ("value",)

    def __init__(self, value: int):
        object.__setattr__(self, "value", value % self.modulus)

    def __setattr__(self, name, _value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __add__(self, other):
        return type(self)(self.value + _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return type(self)(self.value - _coerce(other))

    def __rsub__(self, other):
        return type(self)(_coerce(other) - self.value)

    def __mul__(self, other):
        return type(self)(self.value * _coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-self.value)

    def __pow__(self, exponent: int):
        return type(self)(pow(self.value, exponent, self.modulus))

    def __eq__(self, other) -> bool:
        if isinstance(other, _PrimeFieldElement):
            return type(other) is type(self) and other.value == self.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.value})"

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("cannot invert zero")
        return type(self)(pow(self.value, self.modulus - 2, self.modulus))

    def to_hex(self) -> str:
        """0x-prefixed lowercase hex of the canonical value."""
        return hex(self.value)

    @classmethod
    def from_hex(cls, text: str):
        value = int(text, 16)
        if not 0 <= value < cls.modulus:
            raise ValueError(f"non-canonical value {text!r} for {cls.__name__}")
        return cls(value)


def _coerce(value) -> int:
    return value.value if isinstance(value, _PrimeFieldElement) else value


class FieldElement(_PrimeFieldElement):
    """Element of the curve base field F_p."""

    modulus = P

    def is_square(self) -> bool:
        if self.value == 0:
            return True
        return pow(self.value, (P - 1) // 2, P) == 1

    def sqrt(self) -> "FieldElement":
        root = _tonelli_shanks(self.value)
        if root is None:
            raise ValueError("value is not a quadratic residue")
        return FieldElement(root)

    def sign(self) -> int:
        """1 iff the canonical representative exceeds (p-1)/2."""
        return 1 if self.value > HALF_P else 0


class Scalar(_PrimeFieldElement):
    """Element of Z_q, the subgroup scalar ring."""

    modulus = Q


def _tonelli_shanks(n: int) -> int | None:
    # p = q * 2^s + 1 with q odd; works for any odd prime modulus.
    if n == 0:
        return 0
    if pow(n, (P - 1) // 2, P) != 1:
        return None
    q, s = P - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (P - 1) // 2, P) != P - 1:
        z += 1
    m, c, t, r = s, pow(z, q, P), pow(n, q, P), pow(n, (q + 1) // 2, P)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % P
            i += 1
        b = pow(c, 1 << (m - i - 1), P)
        m, c = i, b * b % P
        t = t * c % P
        r = r * b % P
    return r


# --- raw-integer group law ----------------------------------------------
#
# Extended coordinates (X, Y, T, Z) with x = X/Z, y = Y/Z, T = XY/Z; the
# unified add/double formulas are complete on this curve (a square, d not).

_EXT_IDENTITY = (0, 1, 0, 1)


def _ext_add(p1, p2):
    x1, y1, t1, z1 = p1
    x2, y2, t2, z2 = p2
    xx = x1 * x2 % P
    yy = y1 * y2 % P
    dtt = D * t1 % P * t2 % P
    zz = z1 * z2 % P
    e = ((x1 + y1) * (x2 + y2) - xx - yy) % P
    f = (zz - dtt) % P
    g = (zz + dtt) % P
    h = (yy - A * xx) % P
    return (e * f % P, g * h % P, e * h % P, f * g % P)


def _ext_double(p):
    x, y, _t, z = p
    xx = x * x % P
    yy = y * y % P
    zz2 = 2 * z * z % P
    axx = A * xx % P
    s = x + y
    e = (s * s - xx - yy) % P
    g = (axx + yy) % P
    f = (g - zz2) % P
    h = (axx - yy) % P
    return (e * f % P, g * h % P, e * h % P, f * g % P)


def _ext_to_affine(p):
    x, y, _t, z = p
    zi = pow(z, P - 2, P)
    return (x * zi % P, y * zi % P)


def _scalar_mul_xy(k: int, x: int, y: int) -> tuple[int, int]:
    if k == 0 or (x == 0 and y == 1):
        return (0, 1)
    acc = _EXT_IDENTITY
    base = (x, y, x * y % P, 1)
    while k:
        if k & 1:
            acc = _ext_add(acc, base)
        k >>= 1
        if k:
            base = _ext_double(base)
    return _ext_to_affine(acc)


def _affine_add_xy(x1, y1, x2, y2):
    if x1 == 0 and y1 == 1:
        return (x2, y2)
    if x2 == 0 and y2 == 1:
        return (x1, y1)
    xx = x1 * x2 % P
    yy = y1 * y2 % P
    dxy = D * xx % P * yy % P
    num_x = (x1 * y2 + y1 * x2) % P
    num_y = (yy - A * xx) % P
    den_x = (1 + dxy) % P
    den_y = (1 - dxy) % P
    # Both denominators inverted with a single exponentiation.
    inv = pow(den_x * den_y % P, P - 2, P)
    return (num_x * inv % P * den_y % P, num_y * inv % P * den_x % P)


_WINDOW_BITS = 4
_g_window_table: list[list[tuple[int, int, int, int]]] | None = None


def _generator_window() -> list[list[tuple[int, int, int, int]]]:
    # table[w][d] = d * 16^w * G in extended coordinates, built once.
    global _g_window_table
    if _g_window_table is None:
        base = (GENERATOR_X, GENERATOR_Y, GENERATOR_X * GENERATOR_Y % P, 1)
        table = []
        for _ in range((KAPPA + 1 + _WINDOW_BITS - 1) // _WINDOW_BITS + 1):
            row = [_EXT_IDENTITY]
            for d in range(1, 1 << _WINDOW_BITS):
                row.append(_ext_add(row[d - 1], base))
            table.append(row)
            for _ in range(_WINDOW_BITS):
                base = _ext_double(base)
        _g_window_table = table
    return _g_window_table


def _scalar_mul_generator(k: int) -> tuple[int, int]:
    table = _generator_window()
    acc = _EXT_IDENTITY
    w = 0
    mask = (1 << _WINDOW_BITS) - 1
    while k:
        d = k & mask
        if d:
            acc = _ext_add(acc, table[w][d])
        k >>= _WINDOW_BITS
        w += 1
    return _ext_to_affine(acc)


class PointAccumulator:
    """Running sum of curve points in extended coordinates.

    Defers the affine normalization (one field inversion) to `value()`, which
    makes long addition chains cheap. The result is the exact group sum.
    """

    __slots__ = ("_state",)

    def __init__(self, start: "Point | None" = None):
        if start is None or start.is_identity():
            self._state = _EXT_IDENTITY
        else:
            x, y = start.x.value, start.y.value
            self._state = (x, y, x * y % P, 1)

    def add(self, p: "Point") -> None:
        if p.is_identity():
            return
        x, y = p.x.value, p.y.value
        self._state = _ext_add(self._state, (x, y, x * y % P, 1))

    def equals(self, p: "Point") -> bool:
        """Compare against an affine point without normalizing."""
        x, y, _t, z = self._state
        return x == p.x.value * z % P and y == p.y.value * z % P

    def value(self) -> "Point":
        x, y = _ext_to_affine(self._state)
        return Point.unchecked(x, y)


def is_on_curve(x: FieldElement | int, y: FieldElement | int) -> bool:
    """True iff a*x^2 + y^2 = 1 + d*x^2*y^2."""
    xv, yv = _coerce(x), _coerce(y)
    xx = xv * xv % P
    yy = yv * yv % P
    return (A * xx + yy) % P == (1 + D * xx % P * yy) % P


class Point:
    """Affine point on the curve. The checked constructor rejects off-curve pairs."""

    __slots__ = ("x", "y")

    def __init__(self, x: FieldElement | int, y: FieldElement | int):
        xe = x if isinstance(x, FieldElement) else FieldElement(x)
        ye = y if isinstance(y, FieldElement) else FieldElement(y)
        if not is_on_curve(xe, ye):
            raise NotAPointError(f"({xe.to_hex()}, {ye.to_hex()}) is not on the curve")
        object.__setattr__(self, "x", xe)
        object.__setattr__(self, "y", ye)

    @classmethod
    def unchecked(cls, x: FieldElement | int, y: FieldElement | int) -> "Point":
        """Wrap coordinates without the curve check (untrusted wire input).

        Relations compare such points by value; group operations must not be
        applied to them before validation.
        """
        p = object.__new__(cls)
        object.__setattr__(p, "x", x if isinstance(x, FieldElement) else FieldElement(x))
        object.__setattr__(p, "y", y if isinstance(y, FieldElement) else FieldElement(y))
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Point is immutable")

    @classmethod
    def identity(cls) -> "Point":
        return cls.unchecked(0, 1)

    @classmethod
    def generator(cls) -> "Point":
        return cls.unchecked(GENERATOR_X, GENERATOR_Y)

    def is_identity(self) -> bool:
        return self.x.value == 0 and self.y.value == 1

    def add(self, other: "Point") -> "Point":
        x, y = _affine_add_xy(self.x.value, self.y.value, other.x.value, other.y.value)
        return Point.unchecked(x, y)

    def sub(self, other: "Point") -> "Point":
        return self.add(other.neg())

    def neg(self) -> "Point":
        return Point.unchecked(-self.x.value % P, self.y.value)

    def scalar_mul(self, k: Scalar | int) -> "Point":
        kv = k.value if isinstance(k, Scalar) else k
        if kv < 0:
            raise ValueError("scalar must be non-negative")
        if self.x.value == GENERATOR_X and self.y.value == GENERATOR_Y:
            x, y = _scalar_mul_generator(kv % Q if kv.bit_length() > KAPPA + 1 else kv)
        else:
            x, y = _scalar_mul_xy(kv, self.x.value, self.y.value)
        return Point.unchecked(x, y)

    __add__ = add
    __sub__ = sub
    __neg__ = neg

    def __mul__(self, k):
        return self.scalar_mul(k)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Point):
            return NotImplemented
        return self.x.value == other.x.value and self.y.value == other.y.value

    def __hash__(self):
        return hash((self.x.value, self.y.value))

    def __repr__(self) -> str:
        return f"Point({self.x.value}, {self.y.value})"

    def compress(self) -> "CompactPoint":
        return CompactPoint(self.y, self.x.sign())

    def in_subgroup(self) -> bool:
        return is_on_curve(self.x, self.y) and self.scalar_mul(Q).is_identity()

    def to_json(self) -> dict:
        return {"x": self.x.to_hex(), "y": self.y.to_hex()}

    @classmethod
    def from_json(cls, obj: dict, check: bool = True) -> "Point":
        x = FieldElement.from_hex(obj["x"])
        y = FieldElement.from_hex(obj["y"])
        return cls(x, y) if check else cls.unchecked(x, y)


class CompactPoint:
    """One-coordinate point form: y plus the sign bit of x (1 iff x > (p-1)/2)."""

    __slots__ = ("y", "sign")

    def __init__(self, y: FieldElement | int, sign: int):
        if sign not in (0, 1):
            raise ValueError("sign must be 0 or 1")
        object.__setattr__(self, "y", y if isinstance(y, FieldElement) else FieldElement(y))
        object.__setattr__(self, "sign", sign)

    def __setattr__(self, name, value):
        raise AttributeError("CompactPoint is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CompactPoint):
            return NotImplemented
        return self.y == other.y and self.sign == other.sign

    def __hash__(self):
        return hash((self.y.value, self.sign))

    def __repr__(self) -> str:
        return f"CompactPoint(y={self.y.value}, sign={self.sign})"

    def decompress(self) -> Point:
        """Recover the unique curve point with this y and x-sign."""
        yy = self.y.value * self.y.value % P
        num = (1 - yy) % P
        den = (A - D * yy) % P
        if den == 0:
            raise NotAPointError("degenerate y coordinate")
        xx = num * pow(den, P - 2, P) % P
        root = _tonelli_shanks(xx)
        if root is None:
            raise NotAPointError("y does not correspond to a curve point")
        if root == 0:
            if self.sign == 1:
                raise NotAPointError("x = 0 admits no sign-1 point")
            return Point(0, self.y)
        x = root if (1 if root > HALF_P else 0) == self.sign else P - root
        return Point(x, self.y)

    def to_json(self) -> dict:
        return {"y": self.y.to_hex(), "sign": self.sign}

    @classmethod
    def from_json(cls, obj: dict) -> "CompactPoint":
        return cls(FieldElement.from_hex(obj["y"]), int(obj["sign"]))


IDENTITY = Point.identity()
GENERATOR = Point.generator()

# Startup sanity: the published generator lies in the order-q subgroup.
if not is_on_curve(GENERATOR.x, GENERATOR.y):  # pragma: no cover
    raise RuntimeError("curve generator is not on the curve")
if not GENERATOR.scalar_mul(Q).is_identity():  # pragma: no cover
    raise RuntimeError("curve generator does not have order q")
