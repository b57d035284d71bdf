"""Speech adapters: transcription in, synthesized audio out.

The external services sit behind two tiny interfaces so the rest of the
system never knows which vendor (or stub) is wired in. Stubs are guaranteed
offline: the passthrough transcriber just lifts the sidecar text that dev
builds attach to audio uploads, and the silent synthesizer returns no audio
at all (subtitles always carry the content anyway).
"""

from __future__ import annotations

import base64
import hashlib
import os
from pathlib import Path
from typing import Protocol

from .errors import AsrFailure, TransportError


class Transcriber(Protocol):
    def transcribe(self, audio_bytes: bytes, sidecar_text: str | None = None) -> str:
        ...


class Synthesizer(Protocol):
    def synthesize(self, text: str, session_id: str, turn_index: int) -> str | None:
        ...


class TextPassthroughAsr:
    """Offline stub: the upload must carry its own transcript."""

    def transcribe(self, audio_bytes: bytes, sidecar_text: str | None = None) -> str:
        if sidecar_text is None:
            raise AsrFailure(
                "passthrough transcriber needs sidecar_text on the audio payload"
            )
        return sidecar_text


class SilentTts:
    """Offline stub: no audio resource; the subtitle text stands alone."""

    def synthesize(self, text: str, session_id: str, turn_index: int) -> str | None:
        return None


class HttpAsr:
    """External speech-to-text over HTTPS; needs ASR_API_KEY."""

    def __init__(self, endpoint: str, api_key_env: str = "ASR_API_KEY", transport=None):
        key = os.environ.get(api_key_env, "")
        if not key:
            raise TransportError(f"environment variable {api_key_env} is not set")
        self._endpoint = endpoint
        self._key = key
        self._transport = transport

    def transcribe(self, audio_bytes: bytes, sidecar_text: str | None = None) -> str:
        import httpx

        try:
            with httpx.Client(timeout=120.0, transport=self._transport) as client:
                response = client.post(
                    self._endpoint,
                    content=audio_bytes,
                    headers={
                        "Authorization": f"Bearer {self._key}",
                        "Content-Type": "application/octet-stream",
                    },
                )
                response.raise_for_status()
                return response.json()["text"]
        except httpx.HTTPError as exc:
            raise AsrFailure(f"transcription call failed: {exc}") from exc
        except (KeyError, ValueError) as exc:
            raise AsrFailure(f"unexpected transcription response: {exc}") from exc


class HttpTts:
    """External text-to-speech; stores audio locally and returns a media ref."""

    def __init__(
        self,
        endpoint: str,
        media_dir: str | Path,
        api_key_env: str = "TTS_API_KEY",
        transport=None,
    ):
        key = os.environ.get(api_key_env, "")
        if not key:
            raise TransportError(f"environment variable {api_key_env} is not set")
        self._endpoint = endpoint
        self._key = key
        self._media_dir = Path(media_dir)
        self._transport = transport

    def synthesize(self, text: str, session_id: str, turn_index: int) -> str | None:
        import httpx

        try:
            with httpx.Client(timeout=120.0, transport=self._transport) as client:
                response = client.post(
                    self._endpoint,
                    json={"text": text},
                    headers={"Authorization": f"Bearer {self._key}"},
                )
                response.raise_for_status()
                audio = response.content
        except httpx.HTTPError as exc:
            raise TransportError(f"synthesis call failed: {exc}") from exc
        digest = hashlib.sha256(audio).hexdigest()[:16]
        self._media_dir.mkdir(parents=True, exist_ok=True)
        name = f"{session_id}-{turn_index}-{digest}.audio"
        (self._media_dir / name).write_bytes(audio)
        return f"/media/{name}"


def decode_audio_payload(payload: dict) -> tuple[bytes, str | None]:
    """Unpack the request-body audio object: base64 data plus optional sidecar."""
    data = payload.get("data_b64", "")
    try:
        audio = base64.b64decode(data, validate=True) if data else b""
    except Exception as exc:
        raise AsrFailure(f"audio payload is not valid base64: {exc}") from exc
    return audio, payload.get("sidecar_text")
