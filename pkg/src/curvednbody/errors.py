"""Exception types shared across the package."""


class SingularPair(ValueError):
    """A pair of bodies collides or sits at geodesically conjugate points."""

    def __init__(self, pair, kind, gap):
        self.pair = tuple(pair)
        self.kind = kind
        self.gap = gap
        super().__init__(f"{kind} singularity between bodies {self.pair} (gap {gap:.3e})")


class SingularMatrix(ValueError):
    pass


class InvalidKind(ValueError):
    pass


class SingularityApproached(RuntimeError):
    def __init__(self, pair, kind, t, gap):
        self.pair = tuple(pair)
        self.kind = kind
        self.t = t
        self.gap = gap
        super().__init__(
            f"{kind} singularity approached between bodies {self.pair} at t={t:.17g} (gap {gap:.3e})"
        )


class StepSizeUnderflow(RuntimeError):
    def __init__(self, t, h):
        self.t = t
        self.h = h
        super().__init__(f"step size {h:.3e} underflowed at t={t:.17g}")
