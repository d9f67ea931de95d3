import logging

import numpy as np

log = logging.getLogger(__name__)


class EarlyStopping:
    """Stop after `patience` consecutive epochs without a strict improvement.

    Keeps a copy of the parameters from the best epoch seen so far.
    """

    def __init__(self, patience=5):
        self.patience = patience
        self.best_valid = np.inf
        self.best_valid_epoch = 0
        self.best_params = None
        self.bad_epochs = 0

    def __call__(self, current_valid, epoch, params):
        """Record one validation result; returns True when training should stop."""
        if current_valid < self.best_valid:
            self.best_valid = current_valid
            self.best_valid_epoch = epoch
            self.best_params = params.copy()
            self.bad_epochs = 0
            return False

        self.bad_epochs += 1
        if self.bad_epochs >= self.patience:
            log.info(
                f"Early stopping. Best valid metric was {self.best_valid:.6f} "
                f"at epoch {self.best_valid_epoch}."
            )
            return True
        return False
