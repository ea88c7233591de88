"""Print the verdict table for the standard small examples."""
from ccsdiv.equivalence import check_dpbb, check_open_dpbb, check_open_rooted, check_rooted, fresh_depth
from ccsdiv.syntax import parse, prefix_chain, pretty
from ccsdiv.upto import conclude_rec_congruence

CLOSED = [
    ("0", "tau.0"),
    ("0 + a.0", "tau.0 + a.0"),
    ("rec X.X", "rec X. tau.X"),
    ("a.0 + a.0", "a.0"),
    ("a.tau.b.0", "a.b.0"),
    ("rec X. (tau.X + a.0)", "tau.a.0 + a.0"),
]
OPEN = [("X", "tau.X"), ("a.X", "a.X + a.X"), ("tau.X + a.0", "tau.tau.X + a.0")]


def yn(v):
    return "yes" if v.result else "no"


def main():
    print(f"{'P':<24} {'Q':<24} {'unrooted':>9} {'rooted':>7}")
    for p, q in CLOSED:
        P, Q = parse(p), parse(q)
        print(f"{pretty(P):<24} {pretty(Q):<24} {yn(check_dpbb(P, Q)):>9} {yn(check_rooted(P, Q)):>7}")
    print()
    print(f"{'E':<24} {'F':<24} {'unrooted':>9} {'rooted':>7} {'rec via up-to':>14}")
    for e, f in OPEN:
        E, F = parse(e), parse(f)
        up = conclude_rec_congruence(E, F)
        print(f"{pretty(E):<24} {pretty(F):<24} {yn(check_open_dpbb(E, F)):>9} "
              f"{yn(check_open_rooted(E, F)):>7} {up.status if up.details['precondition'] else 'n/a':>14}")
    print()
    print("chains a^i vs a^j (i, j <= 6): equivalent exactly on the diagonal:",
          all(check_dpbb(prefix_chain("a", i), prefix_chain("a", j)).result == (i == j)
              for i in range(7) for j in range(7)))
    for roots in (["0"], ["a.0"], ["rec X. tau.X"], ["a.b.0", "tau.a.0"]):
        print(f"fresh depth of {roots}: {fresh_depth([parse(r) for r in roots])}")


if __name__ == "__main__":
    main()
