"""emocorr: mine interemotion correlation from classifier confusion.

Two small text classifiers over three feature views produce six confusion
matrices per dataset; this package row-normalizes them into correlation
matrices and mines an undirected confusion law (PCA features, distances,
entropy filtering) and a directed evolution law (top misjudgments,
limited-step traces, circulations, most-reliable transfer paths).
"""

from .confusion import (
    CorrelationMatrix,
    EigenDecomposition,
    EmotionFeatureMatrix,
    PerspectiveSet,
    assemble_perspectives,
    confusion_law_report,
    distance_and_scores,
    emotion_feature_vector,
    feature_matrix,
    jacobi_eigh,
    mine_confusion,
    principal_components,
    row_normalize,
    sequence_and_entropy,
)
from .corpus import (
    LabeledText,
    RawRecord,
    SourceKind,
    Vocabulary,
    build_vocab,
    label_by_votes,
    label_records,
    parse_corpus,
    split_train_test,
)
from .emotions import EMOTIONS, NUM_EMOTIONS, emotion_index, emotion_name
from .errors import (
    ConfigurationError,
    CorpusFormatError,
    DataError,
    DegenerateSpectrumError,
    EmocorrError,
    TrainingDivergedError,
    UnreachableError,
)
from .evolution import (
    MisjudgmentPair,
    Trace,
    TraceCondition,
    best_trace,
    detect_circulations,
    greedy_trace,
    misjudgment_law,
    one_step_top,
    shortest_path,
)
from .features import (
    FeatureSequence,
    FeatureView,
    SynonymLexicon,
    apply_synonym_map,
    extract_tokens,
    load_synonym_lexicon,
    pad_and_mask,
    tokenize,
    whitespace_tokenizer,
)
from .nn import (
    ModelDims,
    ModelParams,
    ModelVariant,
    TrainConfig,
    backward,
    cross_entropy_loss,
    evaluate_confusion_counts,
    forward,
    forward_sequence,
    init_params,
    load_checkpoint,
    lstm_step,
    save_checkpoint,
    softmax,
    train,
)
from .pipeline import (
    PipelineConfig,
    load_config,
    mine_matrix_files,
    read_matrix_file,
    run_pipeline,
    write_matrix_file,
)

__version__ = "0.1.0"
