//! Flow and price diagnostics.
