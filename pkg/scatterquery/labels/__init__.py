from .rayleigh import (MEDIAN_FACTOR, QUARTILE_LEVELS, BinaryLabelStack, RayleighFit, RayleighFitError,
                       binarize_component, fit_rayleigh, generate_labels, label_statistics,
                       median_threshold, quartile, rayleigh_cdf, rayleigh_pdf)
