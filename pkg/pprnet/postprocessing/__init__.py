from .ensemble import EnsembleModel, ensemble_predict, train_ensemble, transfer_ensemble

__all__ = ["EnsembleModel", "ensemble_predict", "train_ensemble", "transfer_ensemble"]
