"""Encode/decode through partition systems and the Kucera-Gacs codec."""
