"""postlineage: block-level edit history reconstruction for Markdown Q&A posts.

The library splits Markdown post versions into text and code blocks, links
each block to its predecessor in the previous version via configurable
string-similarity metrics, scores matching configurations against human
ground truth, and detects code blocks duplicated across threads.
"""

__version__ = "0.1.0"
