"""Multi-layer LSTM semantic parser for house-service-robot commands:
action-frame detection, argument identification and classification,
k-fold evaluation and semantic-map grounding."""

from .corpus import (AnnotatedSentence, FrameAnnotation, LabelVocab,
                     decode_iob, encode_iob, label_vocab, make_folds,
                     parse_corpus, serialize_corpus)
from .embeddings import (EmbeddingTable, embed_sentence, load_embeddings,
                         lookup, random_embeddings)
from .grounding import (Entity, GroundedCommand, SemanticMap, chain_accuracy,
                        chain_correct, ground_command, ground_element,
                        load_map, serialize_map)
from .model import (ModelConfig, ParsedCommand, build_model, forward,
                    gold_labels, joint_loss, load_checkpoint, predict,
                    save_checkpoint)
from .pipeline import (ChainMetrics, StageMetrics, TrainConfig,
                       cross_validate, evaluate_stagewise, report, span_f1,
                       train)
from .synth import FRAMES, demo_map, generate_synthetic

__version__ = "0.1.0"
