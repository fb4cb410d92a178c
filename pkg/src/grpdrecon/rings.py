"""Exact coefficient rings: the integers, the rationals, and prime fields.

Each ring is a commutative integral domain with 1.  Elements are plain
Python values (int, or Fraction for the rationals); the ring object supplies
the arithmetic, so residues stay reduced mod p and fractions stay in lowest
terms with positive denominators.
"""

from fractions import Fraction


class NotAUnitError(ArithmeticError):
    """A ring inverse was requested for a non-unit."""


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Ring:
    tag = "?"
    zero = 0
    one = 1

    def normalize(self, value):
        raise NotImplementedError

    def add(self, a, b):
        return self.normalize(a + b)

    def sub(self, a, b):
        return self.normalize(a - b)

    def mul(self, a, b):
        return self.normalize(a * b)

    def neg(self, a):
        return self.normalize(-a)

    def is_unit(self, a):
        raise NotImplementedError

    def unit_inverse(self, a):
        raise NotImplementedError

    def parse(self, text):
        raise NotImplementedError

    def format(self, value):
        return str(value)

    def sort_key(self, value):
        return value

    def random_unit(self, rng):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Ring) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return f"Ring({self.tag})"


class IntegerRing(Ring):
    tag = "z"

    def normalize(self, value):
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError(f"{value} is not an integer")
            return int(value)
        return int(value)

    def is_unit(self, a):
        return a in (1, -1)

    def unit_inverse(self, a):
        if a not in (1, -1):
            raise NotAUnitError(f"{a} is not a unit of Z")
        return a

    def parse(self, text):
        return int(text)

    def random_unit(self, rng):
        return rng.choice((1, -1))


class RationalField(Ring):
    tag = "q"
    zero = Fraction(0)
    one = Fraction(1)

    def normalize(self, value):
        return Fraction(value)

    def is_unit(self, a):
        return a != 0

    def unit_inverse(self, a):
        if a == 0:
            raise NotAUnitError("0 is not a unit of Q")
        return Fraction(1) / Fraction(a)

    def parse(self, text):
        return Fraction(text)

    def random_unit(self, rng):
        num = rng.choice((1, -1)) * rng.randrange(1, 6)
        den = rng.randrange(1, 6)
        return Fraction(num, den)


class PrimeField(Ring):
    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.tag = f"fp:{p}"

    def normalize(self, value):
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator not invertible mod {self.p}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def is_unit(self, a):
        return a % self.p != 0

    def unit_inverse(self, a):
        if a % self.p == 0:
            raise NotAUnitError(f"0 is not a unit of F_{self.p}")
        return pow(a, -1, self.p)

    def parse(self, text):
        return int(text) % self.p

    def elements(self):
        return range(self.p)

    def random_unit(self, rng):
        return rng.randrange(1, self.p)


Z = IntegerRing()
Q = RationalField()


def GF(p):
    return PrimeField(p)


def ring_from_tag(tag):
    """Resolve a CLI ring selector: z | q | fp:<p>."""
    tag = tag.lower()
    if tag == "z":
        return Z
    if tag == "q":
        return Q
    if tag.startswith("fp:"):
        return PrimeField(int(tag[3:]))
    raise ValueError(f"unknown ring tag {tag!r} (expected z, q, or fp:<p>)")
