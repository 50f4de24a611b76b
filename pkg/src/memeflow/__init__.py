"""Stream analytics for tweet-like corpora: meme clustering, diffusion
networks, per-user metrics, and an HTTP exploration API."""

__version__ = "0.1.0"
