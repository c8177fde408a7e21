import numpy as np
import pandas as pd


class AverageMeter(object):
    """Running average over the values seen since the last reset."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.val = 0.0
        self.avg = 0.0
        self.sum = 0.0
        self.count = 0

    def update(self, val, n=1):
        self.val = float(val)
        self.sum += self.val * n
        self.count += n
        self.avg = self.sum / self.count


class LossTrace(object):
    """Per-iteration (total, yamaguchi, power) losses of one training run."""

    COLUMNS = ('iter', 'total', 'yamaguchi', 'power')

    def __init__(self):
        self.rows = []

    def __len__(self):
        return len(self.rows)

    def append(self, iteration, total, yamaguchi, power):
        self.rows.append((int(iteration), float(total), float(yamaguchi), float(power)))

    @property
    def total(self):
        return np.array([row[1] for row in self.rows])

    def smoothed(self, window=50):
        """Trailing moving average of the total loss, one value per full window."""
        total = self.total
        if len(total) < window:
            return total.copy()
        kernel = np.ones(window) / window
        return np.convolve(total, kernel, mode='valid')

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=list(self.COLUMNS))

    def to_csv(self, fpath):
        self.to_frame().to_csv(fpath, index=False, float_format='%.17g')

    @classmethod
    def from_csv(cls, fpath):
        trace = cls()
        for row in pd.read_csv(fpath).itertuples(index=False):
            trace.append(row.iter, row.total, row.yamaguchi, row.power)
        return trace
