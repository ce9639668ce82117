from .metrics import LengthMismatch, optimal_assignment, acc, nmi, purity, evaluate
