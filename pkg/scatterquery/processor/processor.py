from __future__ import absolute_import

import logging
import math
import os.path as osp
import time
from typing import List, NamedTuple, Tuple

import numpy as np

from ..autodiff import NonFiniteError, Tape
from ..evaluation_metrics import EvalMetrics, SegmentationEvaluator
from ..polsar.yamaguchi import COMPONENT_NAMES
from ..utils.meter import AverageMeter, LossTrace
from ..utils.serialization import save_checkpoint


class TrainingDivergedError(RuntimeError):

    def __init__(self, iteration, history, reason):
        self.iteration = iteration
        self.history = list(history)
        super(TrainingDivergedError, self).__init__(
            "training diverged at iteration {}: {} (last losses: {})".format(
                iteration, reason, ', '.join('{:.4g}'.format(v) for v in self.history[-5:])))


class TrainResult(NamedTuple):
    trace: LossTrace
    history: List[Tuple[int, EvalMetrics]]


def checkpoint_meta(cfg, samples, iteration):
    return {'iteration': int(iteration), 'seed': int(cfg.SEED), 'config_version': int(cfg.CONFIG_VERSION),
            'model': cfg.MODEL.NAME, 'scenes': [sample.name for sample in samples],
            'power_scales': [float(sample.power_scale) for sample in samples]}


def train_step(model, sample, loss_fn):
    """One forward/backward pass, returns (LossTerms values, gradients)."""
    tape = Tape()
    params = model.bind(tape)
    output = model.forward(params, tape.constant(sample.inputs))
    terms = loss_fn(tape, output.heads, sample)
    grads = tape.backward(terms.total)
    return terms.values(), grads


def batch_step(model, samples, loss_fn):
    """Mean losses and gradients over the scenes, accumulated in list order."""
    totals = np.zeros(3)
    grads = None
    for sample in samples:
        values, sample_grads = train_step(model, sample, loss_fn)
        totals += values
        if grads is None:
            grads = sample_grads
        else:
            for name, grad in sample_grads.items():
                grads[name] = grads[name] + grad
    n = len(samples)
    return tuple(float(v) for v in totals / n), {name: grad / n for name, grad in grads.items()}


def log_metrics(logger, metrics):
    for name in COMPONENT_NAMES:
        logger.info("{:<7} OA: {:.1f}%, mIoU: {:.1f}%, mAcc: {:.1f}%"
                    .format(name, metrics.oa[name], metrics.miou[name], metrics.macc[name]))


def evaluate_samples(model, samples, threshold=0.5):
    evaluator = SegmentationEvaluator(threshold)
    for sample in samples:
        yamaguchi, _ = model.predict(sample.inputs)
        evaluator.update((yamaguchi, sample.labels))
    return evaluator.compute()


def do_train(cfg,
             model,
             samples,
             optimizer,
             loss_fn):
    if not samples:
        raise ValueError("training needs at least one scene")
    log_period = cfg.SOLVER.LOG_PERIOD
    checkpoint_period = cfg.SOLVER.CHECKPOINT_PERIOD
    eval_period = cfg.SOLVER.EVAL_PERIOD
    limit = cfg.SOLVER.DIVERGENCE_LIMIT
    max_iters = cfg.SOLVER.MAX_ITERS

    logger = logging.getLogger("scatterquery.train")
    logger.info('start training on {} scene(s): {}'.format(len(samples), ', '.join(s.name for s in samples)))

    loss_meter = AverageMeter()
    yamaguchi_meter = AverageMeter()
    power_meter = AverageMeter()
    trace = LossTrace()
    history = []
    start_time = time.time()
    for n_iter in range(1, max_iters + 1):
        try:
            (total, ly, lp), grads = batch_step(model, samples, loss_fn)
        except NonFiniteError as e:
            raise TrainingDivergedError(n_iter, trace.total, str(e))
        if not math.isfinite(total) or total > limit:
            raise TrainingDivergedError(n_iter, list(trace.total) + [total],
                                        "loss {} exceeds {:.0e}".format(total, limit))
        trace.append(n_iter, total, ly, lp)
        loss_meter.update(total)
        yamaguchi_meter.update(ly)
        power_meter.update(lp)
        optimizer.step(grads)

        if n_iter % log_period == 0:
            logger.info("Iter[{}/{}] Loss: {:.3f}, Yamaguchi: {:.3f}, Power: {:.3f}, Lr: {:.2e}"
                        .format(n_iter, max_iters, loss_meter.avg, yamaguchi_meter.avg, power_meter.avg,
                                optimizer.get_lr()[0]))
            loss_meter.reset()
            yamaguchi_meter.reset()
            power_meter.reset()

        if checkpoint_period > 0 and n_iter % checkpoint_period == 0:
            save_checkpoint(model.state_dict(),
                            osp.join(cfg.OUTPUT_DIR, cfg.MODEL.NAME + '_{}.sqck'.format(n_iter)),
                            checkpoint_meta(cfg, samples, n_iter))

        if eval_period > 0 and n_iter % eval_period == 0:
            metrics = evaluate_samples(model, samples, cfg.TEST.THRESHOLD)
            history.append((n_iter, metrics))
            logger.info("Validation Results - Iter: {}".format(n_iter))
            log_metrics(logger, metrics)

    elapsed = time.time() - start_time
    logger.info("Training done. {} iterations in {:.1f}[s], loss {:.4g} -> {:.4g}"
                .format(max_iters, elapsed, trace.total[0] if len(trace) else float('nan'),
                        trace.total[-1] if len(trace) else float('nan')))
    return TrainResult(trace, history)


def do_inference(cfg,
                 model,
                 samples):
    logger = logging.getLogger("scatterquery.test")
    logger.info("Enter inferencing")
    metrics = evaluate_samples(model, samples, cfg.TEST.THRESHOLD)
    logger.info("Validation Results ")
    log_metrics(logger, metrics)
    return metrics
