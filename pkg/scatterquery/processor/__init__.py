from .processor import TrainResult, TrainingDivergedError, batch_step, do_inference, do_train, train_step
