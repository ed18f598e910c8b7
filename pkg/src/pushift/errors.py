"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so keep the taxonomy small:
configuration problems, data problems, diverged optimization, and
degenerate prior estimation.
"""


class ConfigError(ValueError):
    """Invalid configuration value or malformed config document."""


class DataError(ValueError):
    """Malformed or insufficient input data (files or arrays)."""


class TrainingDiverged(RuntimeError):
    """Optimization produced a non-finite objective or parameters."""


class DegeneratePriorError(RuntimeError):
    """No admissible thresholding hypothesis exists (gamma_bar >= 1).

    Raised instead of silently returning a fabricated estimate when the
    sample sizes are too small for the confidence radius.
    """

    def __init__(self, gamma_bar, n_pos, n_unl):
        self.gamma_bar = float(gamma_bar)
        self.n_pos = int(n_pos)
        self.n_unl = int(n_unl)
        super().__init__(
            f"degenerate prior estimation: gamma_bar={gamma_bar:.4f} >= 1 "
            f"(n_pos={n_pos}, n_unl={n_unl}); no threshold hypothesis is admissible"
        )
