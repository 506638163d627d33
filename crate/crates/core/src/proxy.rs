//! Proxy metaorder reconstruction.
