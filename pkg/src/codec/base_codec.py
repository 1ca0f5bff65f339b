"""Base class for the coding procedures."""

from abc import ABC, abstractmethod
from typing import Tuple

from src.codec.trace import CodecTrace


class BaseCodec(ABC):
    """
    Abstract base class for codecs that hide a payload z in a path y of a tree.

    Concrete codecs are bound to the objects they code against (a tree, and
    for the partition codec a partition system) and to a start node.
    """

    @abstractmethod
    def encode(self, z_bits: str) -> Tuple[str, CodecTrace]:
        """
        Encode a payload into a tree path.

        Args:
            z_bits: Payload bits

        Returns:
            Tuple of the output prefix y and the full trace
        """
        pass

    @abstractmethod
    def decode(self, y_prefix: str) -> str:
        """
        Recover the payload from an output prefix.

        Args:
            y_prefix: A prefix produced by encode

        Returns:
            The payload bits
        """
        pass

    def roundtrip(self, z_bits: str) -> Tuple[str, str, CodecTrace]:
        """Encode then decode; returns (y, recovered, trace)."""
        y_prefix, trace = self.encode(z_bits)
        return y_prefix, self.decode(y_prefix), trace

    def get_codec_name(self) -> str:
        """
        Get the registry name of this codec.

        Returns:
            String name of the codec
        """
        return self.__class__.__name__.replace("Codec", "").lower()
