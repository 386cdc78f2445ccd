"""Fado-or-not classification from 10-second audio excerpts.

Pipeline: decode WAV -> downsample to 22050 Hz -> pick a 10-second window
-> 32-dimensional descriptor (dynamics, two band rhythms, mean MFCCs) ->
RBF-kernel SVM trained by SMO, tuned by grid search, scored by
cross-validation.
"""

__version__ = "0.1.0"

from .audio_io import (
    AudioBuffer,
    CANONICAL_RATE,
    decode_wav,
    normalize_rms,
    resample,
    rms,
    write_wav_pcm16,
)
from .datafiles import (
    FADO_LABEL,
    OTHER_LABEL,
    read_cache,
    read_manifest,
    write_cache,
    write_manifest,
)
from .dsp import (
    FrameSequence,
    Spectrogram,
    band_slice,
    dct_ii,
    frame_signal,
    magnitude_spectrum,
    mel_filterbank,
    spectrogram,
)
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    confusion_matrix,
    cross_validate,
    evaluate_split,
    expected_accuracy,
    kfold_split,
    train_test_split,
    write_report,
)
from .excerpt import Excerpt, ExcerptStrategy, max_rms_center, select_excerpt
from .features import (
    BandEnvelope,
    FeatureConfig,
    FeatureVector,
    RhythmicDescriptor,
    band_envelope,
    detect_peaks,
    extract_feature_vector,
    mean_mfcc,
    rhythmic_descriptor,
)
from .model_io import load_model, save_model
from .svm import (
    FeatureScaler,
    GridSearchResult,
    LabeledDataset,
    SvmModel,
    decision_value,
    fit_scaler,
    fit_svm,
    grid_search,
    predict,
    rbf_kernel,
    train_smo,
)
