"""Closed-form expected payoffs, written out independently of the tree code."""


def spd_own(x, y, T, R, P, S):
    x1, x2, x3 = x
    y1, y2, y3 = y
    first = x1 * (y2 * R + (1 - y2) * S) + (1 - x1) * (y3 * T + (1 - y3) * P)
    second = y1 * (x2 * R + (1 - x2) * T) + (1 - y1) * (x3 * S + (1 - x3) * P)
    return 0.5 * first + 0.5 * second


def tg_own(x, y, T, R, P, S):
    x1, x2 = x
    y1, y2 = y
    first = x1 * (y2 * R + (1 - y2) * S) + (1 - x1) * P
    second = y1 * (x2 * R + (1 - x2) * T) + (1 - y1) * P
    return 0.5 * first + 0.5 * second


def ug_own(x, y, T, R, P, S):
    x1, x2 = x
    y1, y2 = y
    first = x1 * R + (1 - x1) * (y2 * T + (1 - y2) * S)
    second = y1 * R + (1 - y1) * (x2 * P + (1 - x2) * S)
    return 0.5 * first + 0.5 * second


OWN = {"SPD": spd_own, "TG": tg_own, "UG": ug_own}


def own(protocol, x, y, payoffs):
    return OWN[protocol](x, y, *payoffs)


def paths(protocol, x, y, T, R, P, S):
    """(weight, own, other) per terminal node, enumerated by hand."""
    if protocol == "SPD":
        x1, x2, x3 = x
        y1, y2, y3 = y
        return [
            (0.5 * x1 * y2, R, R), (0.5 * x1 * (1 - y2), S, T),
            (0.5 * (1 - x1) * y3, T, S), (0.5 * (1 - x1) * (1 - y3), P, P),
            (0.5 * y1 * x2, R, R), (0.5 * y1 * (1 - x2), T, S),
            (0.5 * (1 - y1) * x3, S, T), (0.5 * (1 - y1) * (1 - x3), P, P),
        ]
    x1, x2 = x
    y1, y2 = y
    if protocol == "TG":
        return [
            (0.5 * x1 * y2, R, R), (0.5 * x1 * (1 - y2), S, T), (0.5 * (1 - x1), P, P),
            (0.5 * y1 * x2, R, R), (0.5 * y1 * (1 - x2), T, S), (0.5 * (1 - y1), P, P),
        ]
    return [
        (0.5 * x1, R, R), (0.5 * (1 - x1) * y2, T, P), (0.5 * (1 - x1) * (1 - y2), S, S),
        (0.5 * y1, R, R), (0.5 * (1 - y1) * x2, P, T), (0.5 * (1 - y1) * (1 - x2), S, S),
    ]


def general(protocol, x, y, payoffs, alpha, beta, kappa):
    sel = paths(protocol, x, y, *payoffs)
    mor = paths(protocol, x, x, *payoffs)
    own_y = sum(w * o for w, o, _ in sel)
    own_x = sum(w * o for w, o, _ in mor)
    envy = sum(w * max(0, t - o) for w, o, t in sel)
    guilt = sum(w * max(0, o - t) for w, o, t in sel)
    return (1 - kappa) * own_y + kappa * own_x - alpha * envy - beta * guilt


def other(protocol, x, y, payoffs):
    return sum(w * t for w, _, t in paths(protocol, x, y, *payoffs))


def best(protocol, values_by_strategy):
    """Exhaustive argmax; ties to more ones, then the larger vector."""
    top = max(values_by_strategy.values())
    tied = [s for s, v in values_by_strategy.items() if v >= top - 1e-9]
    return max(tied, key=lambda s: (sum(s), s))
