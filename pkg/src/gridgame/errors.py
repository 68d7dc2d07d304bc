"""Exception hierarchy. Every error carries a short machine-readable code
so the service layer can surface structured payloads."""
from __future__ import annotations


class GridGameError(Exception):
    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


# --- case files -------------------------------------------------------------

class CaseError(GridGameError):
    code = "case_error"


class MissingSection(CaseError):
    code = "missing_section"


class MalformedRow(CaseError):
    code = "malformed_row"


class DanglingReference(CaseError):
    code = "dangling_reference"


class NoSlackBus(CaseError):
    code = "no_slack_bus"


class MultipleSlackBus(CaseError):
    code = "multiple_slack_bus"


class DuplicateBusId(CaseError):
    code = "duplicate_bus_id"


# --- grid model -------------------------------------------------------------

class SubstationTooSmall(GridGameError):
    code = "substation_too_small"


class InvalidElementCount(GridGameError):
    code = "invalid_element_count"


class ConfigurationIdOutOfRange(GridGameError):
    code = "configuration_id_out_of_range"


class ShapeMismatch(GridGameError):
    code = "shape_mismatch"


# --- DC solver --------------------------------------------------------------

class NonpositiveReactance(GridGameError):
    code = "nonpositive_reactance"


class SingularSystem(GridGameError):
    code = "singular_system"


# --- environment ------------------------------------------------------------

class ValidationError(GridGameError):
    code = "validation_error"


class BadShape(ValidationError):
    code = "bad_shape"


class BadValue(ValidationError):
    code = "bad_value"


class BadOneHot(ValidationError):
    code = "bad_one_hot"


class EpisodeFinished(GridGameError):
    code = "episode_finished"


class NoSolution(GridGameError):
    code = "no_solution"


class CascadeBudgetExceeded(GridGameError):
    code = "cascade_budget_exceeded"


# --- chronics ---------------------------------------------------------------

class LengthMismatch(GridGameError):
    code = "length_mismatch"


class ImbalanceError(GridGameError):
    code = "imbalance_error"


class UnknownChronic(GridGameError):
    code = "unknown_chronic"


# --- agents -----------------------------------------------------------------

class SimulateUnavailable(GridGameError):
    code = "simulate_unavailable"


# --- service ----------------------------------------------------------------

class UnknownCase(GridGameError):
    code = "unknown_case"


class BadConfig(GridGameError):
    code = "bad_config"


class SessionFinished(GridGameError):
    code = "session_finished"
