from .gst import NonConvergence, gst, gst_scalar, gst_threshold
from .schatten import schatten_prox, prox_objective
