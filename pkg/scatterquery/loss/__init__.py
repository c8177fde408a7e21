from .make_loss import LossTerms, make_loss, total_loss
from .decomposition_loss import PROB_EPS, loss_yamaguchi
from .power_loss import loss_power, reconstructed_power
