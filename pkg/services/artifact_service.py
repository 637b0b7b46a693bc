import json
import logging
import os
from datetime import datetime, timezone

import aiofiles

# Configure module logger
logger = logging.getLogger(__name__)


class ArtifactService:
    """Writes reports, certificates, sequences and figures, and keeps a run-event log"""
    def __init__(self, log_dir=None):
        self.log_dir = log_dir
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)

    async def save_text(self, path, text):
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        try:
            async with aiofiles.open(path, 'w', encoding='utf-8', newline='\n') as f:
                await f.write(text)
            logger.info(f"Wrote {path} ({len(text)} chars)")
        except OSError as e:
            logger.error(f"Error writing {path}: {e}", exc_info=True)
            await self.log_run_event('write_error', {'path': path, 'error': str(e)})
            raise

    async def save_json(self, path, payload):
        await self.save_text(path, json.dumps(payload, indent=2, sort_keys=True) + '\n')

    async def save_figures(self, directory, figures):
        """figures: mapping of file name to SVG document text"""
        for name, document in sorted(figures.items()):
            await self.save_text(os.path.join(directory, name), document)

    async def log_run_event(self, event_type, data=None):
        if not self.log_dir:
            return
        try:
            log_entry = {
                'timestamp': datetime.now(timezone.utc).isoformat(),
                'event_type': event_type
            }
            if data:
                log_entry['data'] = data
            async with aiofiles.open(os.path.join(self.log_dir, 'run_events.log'), 'a') as f:
                await f.write(json.dumps(log_entry, sort_keys=True) + '\n')
        except OSError as e:
            logger.error(f"Error logging run event: {e}")
