"""scriptorium: knowledge base, vision/text tool suite, agent loop, and
benchmark harness for ancient-script research at desk scale."""

__version__ = "0.1.0"
