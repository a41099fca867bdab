"""Exception taxonomy shared by all synthlang modules."""


class SynthlangError(Exception):
    """Base class for every error raised by this package."""


# -- configuration ----------------------------------------------------------

class ConfigParseError(SynthlangError):
    """The config document is not syntactically valid."""


class UnknownKey(ConfigParseError):
    """The config document contains a key this tool does not define."""


class InvalidConfig(SynthlangError):
    """One or more config invariants are violated."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


# -- language / parsing -----------------------------------------------------

class NonAlphabeticStart(SynthlangError):
    """A variable name does not begin with a letter."""


class LexError(SynthlangError):
    """Unknown character in module text."""


class ModuleSyntaxError(SynthlangError):
    """Module text does not match the statement grammar."""


class DialectError(SynthlangError):
    """A symbol from the other dialect appeared in strict parsing mode."""


class NameCollision(SynthlangError):
    """Two distinct source names map to the same translated name."""


# -- evaluation -------------------------------------------------------------

class DivisionByZero(SynthlangError):
    """Modulo with a zero right operand."""


class UnboundVariable(SynthlangError):
    """A name was read before any assignment and is not a known global."""


class GlobalReassignment(SynthlangError):
    """A global was assigned a value other than its canonical one."""


# -- generation / corpus ----------------------------------------------------

class ExhaustedNamespace(SynthlangError):
    """Cannot mint enough unique names at the configured lengths."""


class RegenerationLimitExceeded(SynthlangError):
    """A sample was rejected too many times; the config is degenerate."""


class QuotaInfeasible(SynthlangError):
    """The dataset cannot host the required global appearances."""


class QuotaUnmet(SynthlangError):
    """Post-build verification found a global below its appearance quota."""


class CorruptRecord(SynthlangError):
    """A dataset file contains an unreadable record."""

    def __init__(self, path, line_no, reason):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {reason}")
