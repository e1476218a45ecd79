"""
Run configuration for the :mod:`eigenloc.cli` front-end.

A :class:`RunConfig` is a flat set of named parameters with class-level defaults. It is read from and written to a
single JSON document, and command-line flags override individual fields.
"""
import json

from . import io

__all__ = ['RunConfig']

MANIFOLDS = ("sphere", "torus")


class RunConfig(object):
    """
    Parameters of one batch run.

    Any field may be given as a keyword; unknown keywords raise ``ValueError``. See ``docs/schema.rst`` for the
    meaning of each field.

    Examples
    --------
    >>> cfg = RunConfig(manifold="torus", n=3, N=11, eps=0.7)
    >>> RunConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
    True
    """
    manifold = "sphere"
    n = 3
    m = 1
    N = None
    N_range = None
    target = None
    eps = 0.5
    delta2 = 0.5
    R = 6.0
    h = 0.05
    r = 0
    radius = 1.0
    L = 12
    choice = "center"
    tail_tol = None
    allow_even = False
    seed = 0
    out = "eigenloc-out"

    FIELDS = ("manifold", "n", "m", "N", "N_range", "target", "eps", "delta2", "R", "h", "r", "radius", "L",
              "choice", "tail_tol", "allow_even", "seed", "out")

    def __init__(self, **kwargs):
        self.update(kwargs)

    def update(self, overrides):
        """
        Set fields from a mapping; ``None`` values are skipped so unset command-line flags leave fields alone.
        """
        unknown = sorted(set(overrides) - set(self.FIELDS))
        if unknown:
            raise ValueError("unknown configuration field(s): %s" % ", ".join(unknown))
        for key, value in overrides.items():
            if value is not None:
                setattr(self, key, value)
        return self

    def to_dict(self):
        return {key: getattr(self, key) for key in self.FIELDS}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    @classmethod
    def from_file(cls, path):
        return cls.from_dict(io.read_json(path))

    def to_file(self, path):
        return io.write_json(path, self.to_dict())

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return "RunConfig(%s)" % json.dumps(self.to_dict(), sort_keys=True)

    @property
    def degrees(self):
        """
        The degrees to run: ``N_range`` as given when it is a list, the inclusive range when it is a dict
        ``{"lo": .., "hi": .., "step": ..}``, and ``[N]`` otherwise.
        """
        if self.N_range is None:
            return [] if self.N is None else [int(self.N)]
        if isinstance(self.N_range, dict):
            step = int(self.N_range.get("step", 1))
            return list(range(int(self.N_range["lo"]), int(self.N_range["hi"]) + 1, step))
        return [int(N) for N in self.N_range]

    def wave(self):
        "The target wave, resolved with :func:`eigenloc.io.load_wave`."
        if self.target is None:
            raise ValueError("this subcommand needs a target wave")
        return io.load_wave(self.target)

    def validate(self):
        """
        Check the domain of every field.

        Raises
        ------
        ValueError
            Naming the first offending field.
        """
        if self.manifold not in MANIFOLDS:
            raise ValueError("manifold must be one of %s, got %r" % (MANIFOLDS, self.manifold))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2, got %r" % (self.n,))
        if int(self.m) != self.m or not 1 <= self.m <= self.n:
            raise ValueError("m must be an integer in [1, n], got %r" % (self.m,))
        for key in ("eps", "delta2", "R", "h", "radius"):
            if not getattr(self, key) > 0:
                raise ValueError("%s must be positive, got %r" % (key, getattr(self, key)))
        if self.r not in (0, 1, 2):
            raise ValueError("r must be 0, 1 or 2, got %r" % (self.r,))
        if int(self.L) != self.L or self.L < 0:
            raise ValueError("L must be a non-negative integer, got %r" % (self.L,))
        if self.choice not in ("center", "corner"):
            raise ValueError("choice must be 'center' or 'corner', got %r" % (self.choice,))
        if self.tail_tol is not None and not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive, got %r" % (self.tail_tol,))
        if self.N is not None and (int(self.N) != self.N or self.N < 1):
            raise ValueError("N must be a positive integer, got %r" % (self.N,))
        if any(N < 1 for N in self.degrees):
            raise ValueError("every degree in N_range must be a positive integer")
        if not self.out:
            raise ValueError("out must name a directory")
        return self
