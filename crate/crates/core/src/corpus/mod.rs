//! Posts, annotations and social-group-token (SGT) lexicons.
//!
//! All tables are immutable once loaded and can be shared freely across
//! threads.

mod annotations;
mod lexicon;
mod posts;

pub use annotations::{
    load_annotations, majority_vote, AnnotationRecord, AnnotationSet, LabelCounts, MajorityLabel,
    Vote,
};
pub use lexicon::{
    load_lexicon, match_sgts, mention_index, tokenize, LexiconEntry, MentionIndex, SgtLexicon,
    SgtMention,
};
pub use posts::{load_posts, Post, PostTable};
