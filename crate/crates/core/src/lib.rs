//! Inclusion/exclusion phrase mining for tourism reviews.
//!
//! Two stages: a linear-chain CRF tags review tokens with the five-symbol
//! BIO scheme (`B_INC INC B_EXC EXC O`) to mine inclusion and exclusion
//! phrases, and a multinomial logistic regression assigns each mined phrase
//! one of eleven factor categories. The [`eval`] module scores both stages
//! with binary and proportional span overlap and the end-to-end
//! maximum-intersection protocol.
//!
//! ```
//! use incex::corpus::{parse_dataset, BioTag};
//!
//! let data = parse_dataset("Great\tO\nfood\tB_INC\nhere\tINC\n").unwrap();
//! assert_eq!(data[0].tags(), [BioTag::O, BioTag::BeginInc, BioTag::Inc]);
//! assert_eq!(data[0].phrases()[0].text, "food here");
//! ```

pub mod classifier;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod model_file;
pub mod symbols;
pub mod synthetic;
pub mod tagger;

mod optim;

pub use optim::TrainConfig;
