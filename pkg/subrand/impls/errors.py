# Copyright (c) subrand contributors.
# Licensed under the MIT license.


class SubrandError(Exception):
    """Base class of every error raised by subrand. `tag` names the claim it guards."""
    tag = 'subrand'

    def __init__(self, message, tag=None, index=None):
        super().__init__(message)
        if tag is not None:
            self.tag = tag
        self.index = index


class HorizonExhausted(SubrandError):
    tag = 'horizon-exhausted'


class ControlViolated(SubrandError):
    tag = 'control-violated'


class WeightExceeded(SubrandError):
    tag = 'weight-exceeded'


class InfeasibleStep(SubrandError):
    tag = 'infeasible-step'


class MeasureBoundViolated(SubrandError):
    tag = 'measure-bound-violated'


class PreconditionViolated(SubrandError):
    tag = 'precondition-violated'


class MalformedInput(SubrandError):
    tag = 'malformed-input'


class ClaimViolated(SubrandError):
    tag = 'claim-violated'
