"""Tactile-only grasping on a simulated five-digit hand."""

from .controller import (ControllerConfig, ControllerPhase, EasingParams, GraspController,
                         bezier_ease, closing_step, control_step_size)
from .kinematics import Digit, FingerState, HandState, Joint, actuate_virtual_j0
from .sensors import Baseline, FsrCalibration, RawBiotacSample, TactileFrame, fit_fsr_calibration, normalize, tare
from .slip import SlipDetector, SlipEstimate, SlipParams, window_slope
from .trial import TrialResult, run_grasp
from .world import ObjectSpec, SimConfig, WorldParams

__all__ = [
    "Baseline", "ControllerConfig", "ControllerPhase", "Digit", "EasingParams", "FingerState",
    "FsrCalibration", "GraspController", "HandState", "Joint", "ObjectSpec", "RawBiotacSample",
    "SimConfig", "SlipDetector", "SlipEstimate", "SlipParams", "TactileFrame", "TrialResult",
    "WorldParams", "actuate_virtual_j0", "bezier_ease", "closing_step", "control_step_size",
    "fit_fsr_calibration", "normalize", "run_grasp", "tare", "window_slope",
]
