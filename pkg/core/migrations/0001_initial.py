from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ScriptRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('script', models.TextField()),
                ('digest', models.CharField(db_index=True, help_text='sha256 of the script text', max_length=64)),
                ('seed', models.IntegerField(default=7)),
                ('status', models.CharField(choices=[('pass', 'Pass'), ('fail', 'Fail'), ('inconclusive', 'Inconclusive'), ('error', 'Error')], max_length=20)),
                ('exit_code', models.PositiveSmallIntegerField(default=0)),
                ('report', models.JSONField(default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'script run',
                'verbose_name_plural': 'script runs',
                'ordering': ['-created_at', '-id'],
            },
        ),
    ]
