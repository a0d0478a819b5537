"""Independent sympy evaluations of the bidifferential formulas, used as test oracles."""

import sympy as sp

lam = sp.Symbol("lam")
phi, psi, p, J = sp.symbols("phi psi p J")


def torus_expr(f):
    """PhaseFunction on the torus -> sympy expression with z = exp(i phi), w = exp(i psi)."""
    out = 0
    for (k, l, m, n), c in f.terms.items():
        out += (sp.Rational(c.re.numerator, c.re.denominator)
                + sp.I * sp.Rational(c.im.numerator, c.im.denominator)) \
            * sp.exp(sp.I * k * phi) * sp.exp(sp.I * l * psi) * p ** m * J ** n
    return out


def flat_expr(f, d):
    xs = sp.symbols(f"x1:{d + 1}")
    ps = sp.symbols(f"p1:{d + 1}")
    out = 0
    for key, c in f.terms.items():
        term = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        for j in range(d):
            term *= xs[j] ** key[j] * ps[j] ** key[d + j]
        out += term
    return out


def series_expr(s, to_expr):
    return sum(to_expr(f) * lam ** r for r, f in enumerate(s.coeffs))


def exp_bidiff(f, g, pairs, order):
    """mu o exp(sum_i c_i d_{u_i} (x) d_{v_i}) f (x) g truncated at lam**order; pairs = [(c, u, v)]."""
    terms = [(sp.Integer(1), f, g)]
    total = f * g
    for r in range(1, order + 1):
        nxt = []
        for coef, a, b in terms:
            for c, u, v in pairs:
                nxt.append((coef * c / r, sp.diff(a, u), sp.diff(b, v)))
        terms = nxt
        total += sum(coef * a * b for coef, a, b in terms)
    return sp.expand(total)


def torus_star(f, g, order):
    c = lam / sp.I
    return exp_bidiff(f, g, [(c, phi, p), (c, J, psi)], order)


def flat_star(f, g, d, order, weyl=False):
    xs = sp.symbols(f"x1:{d + 1}")
    ps = sp.symbols(f"p1:{d + 1}")
    if weyl:
        c = lam / (2 * sp.I)
        pairs = [(c, xs[j], ps[j]) for j in range(d)] + [(-c, ps[j], xs[j]) for j in range(d)]
    else:
        pairs = [(lam / sp.I, xs[j], ps[j]) for j in range(d)]
    return exp_bidiff(f, g, pairs, order)


def s_op(f, sign, order, P=p):
    """exp(sign lam P d_J) f truncated."""
    out, term = f, f
    for j in range(1, order + 1):
        term = sign * lam * P * sp.diff(term, J) / j
        out += term
    return sp.expand(out)


def truncate(expr, order):
    expr = sp.expand(expr)
    return sum(expr.coeff(lam, r) * lam ** r for r in range(order + 1))


def perturbed_star(f, g, order):
    return truncate(s_op(torus_star(s_op(f, -1, order), s_op(g, -1, order), order), 1, order), order)


def same(a, b):
    return sp.simplify(sp.expand(sp.expand_complex(0) + a - b)) == 0
