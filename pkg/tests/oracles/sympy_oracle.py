"""Independent sympy computations behind the frozen values in the test suite.

Run with ``python3 tests/oracles/sympy_oracle.py``.  Nothing here imports
rumin_lab: charts are written out by hand, the coframe of H1 x R is the
explicit theta_4 = dx4 + x2/2 dx1 - x1/2 dx2, and boundaries are the four
oriented edges of the unit square.
"""

from sympy import Rational, diff, expand, integrate, sympify, symbols

x1, x2, x3, x4, u, v, s = symbols("x1 x2 x3 x4 u v s")
X = (x1, x2, x3, x4)
half = Rational(1, 2)

# H1 x R: theta_i = dx_i (i < 4), theta_4 as above; dual fields
THETA = [
    {x1: 1},
    {x2: 1},
    {x3: 1},
    {x4: 1, x1: x2 / 2, x2: -x1 / 2},
]


def X1(f):
    return diff(f, x1) - x2 / 2 * diff(f, x4)


def X2(f):
    return diff(f, x2) + x1 / 2 * diff(f, x4)


def X3(f):
    return diff(f, x3)


def X4(f):
    return diff(f, x4)


def on(chart, f):
    return sympify(f).subs(dict(zip(X, chart)), simultaneous=True)


def theta_along(chart, i, var):
    """theta_i(d chart / d var) as a function of the parameters."""
    return sum(on(chart, c) * diff(chart[X.index(xj)], var) for xj, c in THETA[i].items())


def pull1(chart, form, var):
    """form = {i: coefficient}; pullback of a 1-form along one parameter."""
    return sum(on(chart, f) * theta_along(chart, i, var) for i, f in form.items())


def pull2(chart, form):
    """form = {(i, j): coefficient}; coefficient of du ^ dv."""
    acc = 0
    for (i, j), f in form.items():
        a = theta_along(chart, i, u) * theta_along(chart, j, v) - theta_along(chart, i, v) * theta_along(chart, j, u)
        acc += on(chart, f) * a
    return expand(acc)


def surface_integral(chart, form):
    return integrate(pull2(chart, form), (u, 0, 1), (v, 0, 1))


def square_boundary_integral(chart, form):
    """Counterclockwise edges of [0,1]^2."""
    edges = [
        ({u: s, v: 0}, s, 1),
        ({u: 1, v: s}, s, 1),
        ({u: s, v: 1}, s, -1),
        ({u: 0, v: s}, s, -1),
    ]
    total = 0
    for sub, var, sign in edges:
        edge = [c.subs(sub, simultaneous=True) for c in chart]
        total += sign * integrate(expand(pull1(edge, form, var)), (var, 0, 1))
    return total


def rumin_pieces(f1, f2, f3):
    """Explicit dc alpha and the two correction terms for alpha = f1 t1 + f2 t2 + f3 t3."""
    g = X1(f2) - X2(f1)
    dc = {
        (0, 2): X1(f3) - X3(f1),
        (1, 2): X2(f3) - X3(f2),
        (0, 3): X1(g) - X4(f1),
        (1, 3): X2(g) - X4(f2),
    }
    return dc, {3: g}, {(2, 3): X3(g) - X4(f3)}


def report(name, chart, f1, f2, f3):
    alpha = {0: f1, 1: f2, 2: f3}
    dc, pi_shift, interior_term = rumin_pieces(f1, f2, f3)
    lhs = square_boundary_integral(chart, alpha)
    rhs = surface_integral(chart, dc)
    bcorr = -square_boundary_integral(chart, pi_shift)  # alpha - Pi_E alpha = -(X1 f2 - X2 f1) theta_4
    icorr = surface_integral(chart, interior_term)
    print(f"{name}: boundary {lhs}  interior {rhs}  discrepancy {lhs - rhs}  "
          f"boundary correction {bcorr}  interior correction {icorr}")


if __name__ == "__main__":
    deg3 = [u, 0 * u, u, v]  # w = (u, 0, 0, v), phi(w) = (0, w1)
    print("deg3 graph, integral of theta3^theta4:", surface_integral(deg3, {(2, 3): 1}))
    report("deg3 graph, x4 theta1", deg3, x4, 0, 0)

    # the h1xr_lens chart, written out: a dilation cone over a closed horizontal loop
    lens = [v * (u - u**2),
            v * (-2 * u**3 + Rational(13, 3) * u**4 - Rational(7, 3) * u**5),
            v * (u - 3 * u**2 + 2 * u**3),
            v**2 * (-half * u**4 + Rational(3, 2) * u**5 - Rational(3, 2) * u**6 + half * u**7)]
    loop = [c.subs(v, 1) for c in lens]
    assert expand(theta_along(loop, 3, u)) == 0 and all(c.subs(u, 1) == c.subs(u, 0) for c in loop)
    report("h1xr lens, x2*x3 theta1", lens, x2 * x3, 0, 0)

    # H1 horizontal curve (t, t, 0): f = x1*x2 + x3 in H1 coordinates (x, y, t)
    curve = [s, s, 0 * s]
    f = x1 * x2 + x3
    end_minus_start = f.subs({x1: 1, x2: 1, x3: 0}) - f.subs({x1: 0, x2: 0, x3: 0})
    # H1: theta_3 = dt + y/2 dx - x/2 dy, so X = d/dx - y/2 d/dt and Y = d/dy + x/2 d/dt
    Xf = diff(f, x1) - x2 / 2 * diff(f, x3)
    Yf = diff(f, x2) + x1 / 2 * diff(f, x3)
    sub = dict(zip((x1, x2, x3), curve))
    horizontal = integrate(Xf.subs(sub) * 1 + Yf.subs(sub) * 1, (s, 0, 1))
    print("h1 curve, f = x1*x2 + x3: boundary", end_minus_start, " interior", horizontal)

    # H1 x R pair graph (u, u, v, 0) with the weight-1 form x3 theta1
    pair = [u, u, v, 0 * u]
    a = {0: x3}
    d1 = {(0, 1): -X2(x3), (0, 2): -X3(x3), (1, 2): 0}
    print("h1xr pair1, x3 theta1: boundary", square_boundary_integral(pair, a),
          " interior", surface_integral(pair, d1))
