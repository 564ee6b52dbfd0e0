import os
import tempfile

from core import settings
from core.errors import ReportIoError
from utils.logger import get_logger

logger = get_logger("organizer")


def write_atomic(path: str, content) -> str:
    """Write via a temp file in the target directory, then rename over ``path``"""
    target_dir = os.path.dirname(os.path.abspath(path))
    mode = "wb" if isinstance(content, bytes) else "w"
    tmp_path = None
    try:
        os.makedirs(target_dir, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", dir=target_dir)
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as f:
            f.write(content)
        os.replace(tmp_path, path)
    except OSError as e:
        if tmp_path is not None and os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise ReportIoError(f"cannot write report: {e}", path) from e
    return path


class ProjectOrganizer:
    _instance = None
    _initialized = False

    class SaveType:
        REPORTS = "reports"
        DEGREES = "degrees"
        CERTIFICATES = "certificates"
        SCANS = "scans"

    @classmethod
    def configure(cls, workdir: str) -> "ProjectOrganizer":
        """Point the singleton at a new work directory"""
        cls._instance = None
        cls._initialized = False
        return cls(workdir=workdir)

    @classmethod
    def init_all_subdirs(cls, **kwargs):
        instance = cls(**kwargs)
        for save_type in (cls.SaveType.REPORTS, cls.SaveType.DEGREES,
                          cls.SaveType.CERTIFICATES, cls.SaveType.SCANS):
            os.makedirs(instance._dir_by_type(save_type), exist_ok=True)

    @classmethod
    def get_save_dir(cls, save_type: str, **kwargs) -> str:
        instance = cls(**kwargs)
        return instance._dir_by_type(save_type) + "/"

    @classmethod
    def save(cls, save_type: str, content, file_name: str, **kwargs) -> str:
        instance = cls(**kwargs)
        path = os.path.join(instance._dir_by_type(save_type), file_name)
        write_atomic(path, content)
        logger.info(f"💾 saved {file_name} to {instance._dir_by_type(save_type)}")
        return path

    @classmethod
    def load(cls, save_type: str, file_name: str, **kwargs) -> str:
        instance = cls(**kwargs)
        path = os.path.join(instance._dir_by_type(save_type), file_name)
        try:
            with open(path, "r", encoding="utf-8") as f:
                return f.read()
        except OSError as e:
            raise ReportIoError(f"cannot read report: {e}", path) from e

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super(ProjectOrganizer, cls).__new__(cls)
        return cls._instance

    def __init__(self, workdir: str = settings.WORKDIR):
        if not ProjectOrganizer._initialized:
            self.work_dir = workdir
            ProjectOrganizer._initialized = True

    def _dir_by_type(self, save_type: str) -> str:
        return os.path.join(self.work_dir, save_type)
