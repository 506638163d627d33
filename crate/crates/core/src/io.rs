//! CSV and binary cache input/output.
