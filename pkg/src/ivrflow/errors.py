"""Exception hierarchy shared across the engine."""


class IvrError(Exception):
    """Base class for all engine errors."""


class ConfigError(IvrError):
    """Invalid configuration value, file or cross-reference."""

    def __init__(self, message, path=None, field=None):
        self.path = str(path) if path is not None else None
        self.field = field
        where = []
        if self.path:
            where.append(self.path)
        if field:
            where.append(field)
        prefix = f"{': '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class TemplateError(ConfigError):
    pass


# dialog state machine
class TerminalSessionError(IvrError):
    pass


class ProtocolViolationError(IvrError):
    pass


class UnroutableClassError(IvrError):
    pass


# backends
class BackendError(IvrError):
    """Failure in an external model backend; the session escalates."""


class AsrUnavailableError(BackendError):
    pass


class ClassifierUnavailableError(BackendError):
    pass


class BackendContractError(BackendError):
    pass


class TtsUnavailableError(BackendError):
    pass


class EmptyUtteranceError(IvrError):
    pass


# metrics / simulation
class EmptyReferenceError(IvrError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class IncompleteBatchError(IvrError):
    pass


class ScenarioUnderrunError(IvrError):
    pass


class InputError(IvrError):
    pass


# wire protocol
class FrameError(IvrError):
    def __init__(self, reason, field=None):
        self.reason = reason
        self.field = field
        super().__init__(reason if field is None else f"{reason}: {field}")


class EncodeError(IvrError):
    pass


class UnknownCallError(IvrError):
    pass
