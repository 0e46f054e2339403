"""Class-conditional tabular data synthesis with per-class energy models."""

from ._tabebm import (  # noqa: F401
    ClassEBM,
    DataError,
    Dataset,
    EmptyRequest,
    Error,
    NonFiniteState,
    Preprocessor,
    SchemaMismatch,
    SyntheticDataset,
    TrainingDivergence,
    UsageError,
    adtm_normalize,
    allocate_class_counts,
    balanced_accuracy,
    chi2_test,
    dataset_from_arrays,
    dcr,
    delta_presence,
    fidelity_report,
    fit_class_ebms,
    generate,
    inverse_kl,
    inverse_transform,
    ks_two_sample,
    load_csv,
    parse_csv,
    run_experiment,
    set_max_threads,
    toy,
)


def synthesize(train, total=500, seed=0, backend="rbf", **sgld):
    """Fits per-class models on raw `train` and returns (synthetic set, preprocessor).

    Synthetic rows are in the standardized space of the returned preprocessor.
    """
    prep = Preprocessor.fit(train)
    pre = prep.apply(train, True)
    ebms = fit_class_ebms(pre, backend=backend, seed=seed)
    return generate(ebms, pre, total=total, seed=seed, **sgld), prep
