"""Query rewriting for retrieval-augmented question answering, with offline mock services."""
