"""Speech-level corpora from stenographic parliamentary protocols."""

from .corpus_io import CorpusRecord, read_corpus, write_corpus
from .metadata import (Party, PartyRegistry, Roster, RosterEntry,
                       SessionCalendar, SessionDateRecord, SpeakerKind,
                       SpeakerRef, load_parties, load_roster, load_sessions,
                       resolve_speaker, session_date)
from .preprocess import (GrayBitmap, binarize, deskew, estimate_skew,
                         otsu_threshold, rotate)
from .segmenter import (BoundaryMethod, PatternSet, RawDocument, Segment,
                        SegmentKind, SessionBody, SourceKind, detect_comment,
                        detect_speaker_line, find_session_body,
                        find_session_end, find_session_start,
                        segment_document, split_multi_session, split_speeches)
from .spellcheck import (CorrectionDictionary, CorrectionResult,
                         build_dictionary, correct_lines, correct_token,
                         levenshtein, load_lexicon, max_edit_distance)
from .stats import CorpusStats, average_age_series, compute_stats, count_segments

__version__ = "0.1.0"
