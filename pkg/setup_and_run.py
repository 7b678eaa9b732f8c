#!/usr/bin/env python3
"""
Exciton Entangler - Universal Setup and Run Script
Creates the venv, installs requirements and forwards arguments to main.py.

    python setup_and_run.py                       # verify --quick
    python setup_and_run.py run data/configs/fig2b.yaml
"""

import platform
import subprocess
import sys
from pathlib import Path

DEFAULT_ARGS = ["verify", "--quick"]


def print_header():
    """Print welcome header."""
    print("=" * 50)
    print("Exciton Entangler - Setup and Run")
    print("=" * 50)
    print()


def check_python_version():
    """dataclass(slots=True) needs Python 3.10+."""
    version = sys.version_info
    if version < (3, 10):
        print(f"[ERROR] Python 3.10+ requerido. Você tem Python {version.major}.{version.minor}")
        sys.exit(1)
    print(f"[INFO] Python {version.major}.{version.minor}.{version.micro} encontrado!")


def get_venv_python(venv_dir: Path) -> Path:
    """Interpreter path inside the venv for this OS."""
    if platform.system() == "Windows":
        return venv_dir / "Scripts" / "python.exe"
    return venv_dir / "bin" / "python"


def create_venv(venv_dir: Path) -> Path:
    """Create virtual environment if it doesn't exist."""
    if venv_dir.exists():
        print("[INFO] Ambiente virtual já existe.")
        return get_venv_python(venv_dir)

    print("[INFO] Criando ambiente virtual...")
    try:
        subprocess.run([sys.executable, "-m", "venv", str(venv_dir)], check=True)
    except subprocess.CalledProcessError:
        print("[ERROR] Falha ao criar ambiente virtual.")
        sys.exit(1)
    print("[OK] Ambiente virtual criado!")
    return get_venv_python(venv_dir)


def install_dependencies(python_exe: Path, requirements: Path):
    """Install numpy/scipy/Pillow/PyYAML/pytest from requirements.txt."""
    print("[INFO] Instalando dependências...")
    try:
        subprocess.run(
            [str(python_exe), "-m", "pip", "install", "-q", "-r", str(requirements)],
            check=True,
        )
    except subprocess.CalledProcessError:
        print("[ERROR] Falha ao instalar dependências.")
        sys.exit(1)
    print("[OK] Dependências instaladas!")


def run_main(python_exe: Path, root: Path, args: list) -> int:
    """Runs main.py with the given CLI arguments and returns its exit code."""
    command = [str(python_exe), "main.py", *args]
    print(f"[INFO] Executando: main.py {' '.join(args)}")
    print()
    try:
        return subprocess.run(command, cwd=root).returncode
    except KeyboardInterrupt:
        print("\n[INFO] Interrompido pelo usuário.")
        return 130


def main():
    """Main entry point."""
    print_header()
    check_python_version()

    root = Path(__file__).parent
    python_exe = create_venv(root / "venv")
    install_dependencies(python_exe, root / "requirements.txt")
    print()

    exit_code = run_main(python_exe, root, sys.argv[1:] or DEFAULT_ARGS)
    if exit_code != 0:
        print()
        print(f"[ERROR] main.py terminou com código {exit_code}.")
    sys.exit(exit_code)


if __name__ == "__main__":
    main()
